#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "irsim/numerics.hpp"

namespace irsim {

struct Experience {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
};

struct AgentHyperparams {
  double gamma = 0.7;
  double epsilon0 = 0.6;
  double epsilon_min = 0.005;
  double epsilon_decay_factor = 0.0;  // default 1 - 10^-3.5, see default_epsilon_decay_factor()
  int batch_size = 10;
  int pool_capacity = 300;
  int align_every = 50;  // decision epochs between target alignments
  double learning_rate = 1e-3;
  double rmsprop_decay = 0.9;
  double rmsprop_epsilon = 1e-8;
  bool huber_loss = false;
};

double default_epsilon_decay_factor();

/// eps(t) = max(eps_min, factor * eps(t-T)); applied once per decision epoch.
double epsilon_decay(double epsilon_prev, const AgentHyperparams& hp);

/// FIFO ring buffer of experiences.
class ExperiencePool {
 public:
  explicit ExperiencePool(std::size_t capacity);

  void push(Experience e);
  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Uniform sample without replacement; empty when size < batch.
  std::vector<Experience> sample(std::size_t batch, RngStream& stream) const;
  /// i-th oldest experience.
  const Experience& oldest(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;  // overwrite position once full
  std::vector<Experience> buffer_;
};

/// Two-hidden-layer ReLU MLP with a linear output head, its target copy,
/// and per-weight RMSProp state. All math in double precision.
class QNetwork {
 public:
  QNetwork(int input, int hidden1, int hidden2, int output, RngStream& init_stream);

  int input_size() const { return layers_[0].in; }
  int output_size() const { return layers_[2].out; }

  std::vector<double> forward(std::span<const double> state) const;
  std::vector<double> forward_target(std::span<const double> state) const;

  /// One bootstrapped Q-learning update on the batch:
  /// y = r + gamma max_a' Q(s', a'; target), loss = mean (Q(s,a) - y)^2
  /// (or Huber), one RMSProp step. Returns the pre-update loss.
  double train_step(const std::vector<Experience>& batch, const AgentHyperparams& hp);

  /// Copies train weights into the target network.
  void align_target();

  std::size_t parameter_count() const;
  /// Train-network parameters, flattened as (W1,b1,W2,b2,W3,b3) row-major.
  std::vector<double> parameters() const;
  void set_parameters(const std::vector<double>& flat);
  double batch_loss(const std::vector<Experience>& batch, const AgentHyperparams& hp) const;
  std::vector<double> batch_gradient(const std::vector<Experience>& batch,
                                     const AgentHyperparams& hp) const;

  void save(const std::string& path) const;
  static QNetwork load(const std::string& path);

 private:
  struct Dense {
    int in = 0;
    int out = 0;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;
  };

  QNetwork() = default;
  static std::vector<double> layer_forward(const Dense& d, const std::vector<double>& x,
                                           bool relu);
  std::vector<double> run(const Dense* layers, std::span<const double> state) const;

  Dense layers_[3];
  Dense target_[3];
  std::vector<double> rms_;  // accumulator, same flat layout as parameters()
};

/// Epsilon-greedy: uniform action with probability epsilon, otherwise the
/// lowest-index argmax of the train network's Q-values.
int select_action(const QNetwork& net, std::span<const double> state, double epsilon,
                  RngStream& stream);

}  // namespace irsim
