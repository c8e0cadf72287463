#include "irsim/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace irsim {

double default_epsilon_decay_factor() { return 1.0 - std::pow(10.0, -3.5); }

double epsilon_decay(double epsilon_prev, const AgentHyperparams& hp) {
  const double factor =
      hp.epsilon_decay_factor > 0.0 ? hp.epsilon_decay_factor : default_epsilon_decay_factor();
  return std::max(hp.epsilon_min, factor * epsilon_prev);
}

ExperiencePool::ExperiencePool(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ExperiencePool: capacity must be >= 1");
  buffer_.reserve(capacity);
}

void ExperiencePool::push(Experience e) {
  if (buffer_.size() < capacity_) {
    buffer_.push_back(std::move(e));
  } else {
    buffer_[next_] = std::move(e);
    next_ = (next_ + 1) % capacity_;
  }
}

const Experience& ExperiencePool::oldest(std::size_t i) const {
  if (buffer_.size() < capacity_) return buffer_[i];
  return buffer_[(next_ + i) % capacity_];
}

std::vector<Experience> ExperiencePool::sample(std::size_t batch, RngStream& stream) const {
  if (buffer_.size() < batch) return {};
  std::vector<std::size_t> idx(buffer_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<Experience> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const std::size_t pick = i + stream.uniform_index(idx.size() - i);
    std::swap(idx[i], idx[pick]);
    out.push_back(buffer_[idx[i]]);
  }
  return out;
}

QNetwork::QNetwork(int input, int hidden1, int hidden2, int output, RngStream& init_stream) {
  if (input < 1 || hidden1 < 1 || hidden2 < 1 || output < 1) {
    throw std::invalid_argument("QNetwork: layer sizes must be >= 1");
  }
  const int dims[4] = {input, hidden1, hidden2, output};
  for (int l = 0; l < 3; ++l) {
    Dense& d = layers_[l];
    d.in = dims[l];
    d.out = dims[l + 1];
    d.w.resize(static_cast<std::size_t>(d.in) * d.out);
    d.b.assign(d.out, 0.0);
    // He-style uniform init scaled by fan-in.
    const double bound = std::sqrt(6.0 / d.in);
    for (double& w : d.w) w = (2.0 * init_stream.uniform01() - 1.0) * bound;
  }
  for (int l = 0; l < 3; ++l) target_[l] = layers_[l];
  rms_.assign(parameter_count(), 0.0);
}

std::vector<double> QNetwork::layer_forward(const Dense& d, const std::vector<double>& x,
                                            bool relu) {
  std::vector<double> y(d.out);
  for (int o = 0; o < d.out; ++o) {
    double s = d.b[o];
    const double* row = &d.w[static_cast<std::size_t>(o) * d.in];
    for (int i = 0; i < d.in; ++i) s += row[i] * x[i];
    y[o] = relu ? std::max(s, 0.0) : s;
  }
  return y;
}

std::vector<double> QNetwork::run(const Dense* layers, std::span<const double> state) const {
  if (static_cast<int>(state.size()) != layers[0].in) {
    throw std::invalid_argument("QNetwork: state size mismatch");
  }
  std::vector<double> x(state.begin(), state.end());
  x = layer_forward(layers[0], x, true);
  x = layer_forward(layers[1], x, true);
  return layer_forward(layers[2], x, false);
}

std::vector<double> QNetwork::forward(std::span<const double> state) const {
  return run(layers_, state);
}

std::vector<double> QNetwork::forward_target(std::span<const double> state) const {
  return run(target_, state);
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const Dense& d : layers_) n += d.w.size() + d.b.size();
  return n;
}

std::vector<double> QNetwork::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const Dense& d : layers_) {
    flat.insert(flat.end(), d.w.begin(), d.w.end());
    flat.insert(flat.end(), d.b.begin(), d.b.end());
  }
  return flat;
}

void QNetwork::set_parameters(const std::vector<double>& flat) {
  if (flat.size() != parameter_count()) {
    throw std::invalid_argument("set_parameters: wrong length");
  }
  std::size_t pos = 0;
  for (Dense& d : layers_) {
    std::copy_n(flat.begin() + pos, d.w.size(), d.w.begin());
    pos += d.w.size();
    std::copy_n(flat.begin() + pos, d.b.size(), d.b.begin());
    pos += d.b.size();
  }
}

double QNetwork::batch_loss(const std::vector<Experience>& batch,
                            const AgentHyperparams& hp) const {
  if (batch.empty()) throw std::invalid_argument("batch_loss: empty batch");
  double loss = 0.0;
  for (const Experience& e : batch) {
    const auto qn = forward_target(e.next_state);
    const double y = e.reward + hp.gamma * *std::max_element(qn.begin(), qn.end());
    const auto q = forward(e.state);
    const double err = q[e.action] - y;
    if (hp.huber_loss) {
      const double a = std::abs(err);
      loss += a <= 1.0 ? 0.5 * err * err : a - 0.5;
    } else {
      loss += err * err;
    }
  }
  return loss / static_cast<double>(batch.size());
}

std::vector<double> QNetwork::batch_gradient(const std::vector<Experience>& batch,
                                             const AgentHyperparams& hp) const {
  if (batch.empty()) throw std::invalid_argument("batch_gradient: empty batch");
  std::vector<double> grad(parameter_count(), 0.0);
  const std::size_t w1 = layers_[0].w.size();
  const std::size_t b1 = layers_[0].b.size();
  const std::size_t w2 = layers_[1].w.size();
  const std::size_t b2 = layers_[1].b.size();
  const std::size_t w3 = layers_[2].w.size();
  double* g_w1 = grad.data();
  double* g_b1 = g_w1 + w1;
  double* g_w2 = g_b1 + b1;
  double* g_b2 = g_w2 + w2;
  double* g_w3 = g_b2 + b2;
  double* g_b3 = g_w3 + w3;

  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  for (const Experience& e : batch) {
    const auto qn = forward_target(e.next_state);
    const double y = e.reward + hp.gamma * *std::max_element(qn.begin(), qn.end());

    // Forward pass keeping activations.
    std::vector<double> x(e.state.begin(), e.state.end());
    const std::vector<double> h1 = layer_forward(layers_[0], x, true);
    const std::vector<double> h2 = layer_forward(layers_[1], h1, true);
    const std::vector<double> q = layer_forward(layers_[2], h2, false);

    const double err = q[e.action] - y;
    double dq;
    if (hp.huber_loss) {
      dq = std::clamp(err, -1.0, 1.0) * inv_batch;
    } else {
      dq = 2.0 * err * inv_batch;
    }

    // Output layer: gradient flows only through the taken action's row.
    const Dense& l3 = layers_[2];
    std::vector<double> dh2(l3.in, 0.0);
    {
      const std::size_t row = static_cast<std::size_t>(e.action) * l3.in;
      for (int i = 0; i < l3.in; ++i) {
        g_w3[row + i] += dq * h2[i];
        dh2[i] = dq * l3.w[row + i];
      }
      g_b3[e.action] += dq;
    }
    // Hidden layer 2.
    const Dense& l2 = layers_[1];
    std::vector<double> dh1(l2.in, 0.0);
    for (int o = 0; o < l2.out; ++o) {
      if (h2[o] <= 0.0) continue;  // ReLU gate
      const double d = dh2[o];
      const std::size_t row = static_cast<std::size_t>(o) * l2.in;
      for (int i = 0; i < l2.in; ++i) {
        g_w2[row + i] += d * h1[i];
        dh1[i] += d * l2.w[row + i];
      }
      g_b2[o] += d;
    }
    // Hidden layer 1.
    const Dense& l1 = layers_[0];
    for (int o = 0; o < l1.out; ++o) {
      if (h1[o] <= 0.0) continue;
      const double d = dh1[o];
      const std::size_t row = static_cast<std::size_t>(o) * l1.in;
      for (int i = 0; i < l1.in; ++i) g_w1[row + i] += d * x[i];
      g_b1[o] += d;
    }
  }
  return grad;
}

double QNetwork::train_step(const std::vector<Experience>& batch, const AgentHyperparams& hp) {
  const double loss = batch_loss(batch, hp);
  const std::vector<double> grad = batch_gradient(batch, hp);
  std::vector<double> params = parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    rms_[i] = hp.rmsprop_decay * rms_[i] + (1.0 - hp.rmsprop_decay) * grad[i] * grad[i];
    params[i] -= hp.learning_rate * grad[i] / (std::sqrt(rms_[i]) + hp.rmsprop_epsilon);
  }
  set_parameters(params);
  return loss;
}

void QNetwork::align_target() {
  for (int l = 0; l < 3; ++l) target_[l] = layers_[l];
}

void QNetwork::save(const std::string& path) const {
  nlohmann::json j;
  j["format"] = "irsim-qnet";
  j["version"] = 1;
  auto dump = [](const Dense* layers) {
    nlohmann::json arr = nlohmann::json::array();
    for (int l = 0; l < 3; ++l) {
      arr.push_back({{"in", layers[l].in},
                     {"out", layers[l].out},
                     {"w", layers[l].w},
                     {"b", layers[l].b}});
    }
    return arr;
  };
  j["train"] = dump(layers_);
  j["target"] = dump(target_);
  j["rmsprop"] = rms_;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("QNetwork::save: cannot open " + path);
  out << j.dump();
}

QNetwork QNetwork::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("QNetwork::load: cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "irsim-qnet" || j.value("version", 0) != 1) {
    throw std::runtime_error("QNetwork::load: unrecognized checkpoint header");
  }
  QNetwork net;
  auto read = [](const nlohmann::json& arr, Dense* layers) {
    for (int l = 0; l < 3; ++l) {
      layers[l].in = arr[l]["in"].get<int>();
      layers[l].out = arr[l]["out"].get<int>();
      layers[l].w = arr[l]["w"].get<std::vector<double>>();
      layers[l].b = arr[l]["b"].get<std::vector<double>>();
      if (layers[l].w.size() != static_cast<std::size_t>(layers[l].in) * layers[l].out ||
          layers[l].b.size() != static_cast<std::size_t>(layers[l].out)) {
        throw std::runtime_error("QNetwork::load: inconsistent layer shapes");
      }
    }
  };
  read(j["train"], net.layers_);
  read(j["target"], net.target_);
  net.rms_ = j["rmsprop"].get<std::vector<double>>();
  if (net.rms_.size() != net.parameter_count()) {
    throw std::runtime_error("QNetwork::load: inconsistent optimizer state");
  }
  return net;
}

int select_action(const QNetwork& net, std::span<const double> state, double epsilon,
                  RngStream& stream) {
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("select_action: bad epsilon");
  if (stream.uniform01() < epsilon) {
    return static_cast<int>(stream.uniform_index(net.output_size()));
  }
  const auto q = net.forward(state);
  int best = 0;
  for (int a = 1; a < static_cast<int>(q.size()); ++a) {
    if (q[a] > q[best]) best = a;
  }
  return best;
}

}  // namespace irsim
