#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "varqo/objective.hpp"

namespace varqo {

enum class OptMethod { Sgd, Momentum, Nesterov, Adam, Rmsprop };

// "sgd", "momentum", ... Unknown names throw.
std::string opt_method_name(OptMethod m);
OptMethod parse_opt_method(const std::string& name);

// How the optimizer obtains dO/dv for each active variable.
struct GradientMode {
  enum class Kind { Analytic, Numerical, Supplied };

  Kind kind = Kind::Analytic;
  double step = 1e-4;  // central-difference step when Numerical

  // Caller-provided gradient objectives, one per active variable.
  std::map<Variable, Objective> supplied;

  static GradientMode analytic() { return {}; }
  static GradientMode numerical(double step);
  static GradientMode user(std::map<Variable, Objective> components);
};

struct OptimizerConfig {
  OptMethod method = OptMethod::Sgd;
  double lr = 0.1;
  unsigned maxiter = 100;
  GradientMode gradient;

  // When set, only these variables move; the rest stay at their initial
  // values. Must be a subset of the objective's variables.
  std::optional<std::set<Variable>> variables;

  double momentum = 0.9;                  // momentum, nesterov
  double beta1 = 0.9, beta2 = 0.999;      // adam
  double epsilon = 1e-8;                  // adam, rmsprop
  double decay = 0.9;                     // rmsprop

  // Stop once the gradient norm drops below this; 0 disables the check.
  double gtol = 0.0;
};

struct HistoryEntry {
  unsigned iteration = 0;
  double value = 0.0;
  double gradient_norm = 0.0;
  Assignment assignment;
};

struct History {
  std::vector<HistoryEntry> entries;

  std::size_t size() const { return entries.size(); }
  const HistoryEntry& back() const { return entries.back(); }

  // "iteration,value,gradnorm,<var>..." with variables in sorted order.
  std::string to_csv() const;
};

enum class Termination { Maxiter, Gtol };

std::string termination_name(Termination t);

struct OptimizerResult {
  double best_value = 0.0;     // min over the history
  Assignment best_assignment;  // snapshot where best_value was recorded
  History history;
  Termination termination = Termination::Maxiter;
};

// Step-wise driver: each step() evaluates the objective and gradient at the
// current assignment, appends a history entry, and applies one update of the
// configured method. minimize() runs the same machine in a loop, so a manual
// sequence of step() calls reproduces its trajectory exactly.
class Optimizer {
 public:
  Optimizer(const Objective& o, OptimizerConfig config,
            const Assignment& initial = {},
            std::optional<std::uint64_t> samples = std::nullopt,
            std::optional<NoiseModel> noise = std::nullopt,
            std::uint64_t seed = 0, const SimulatorOptions& options = {});

  // One update. Returns the objective value at the pre-update assignment.
  double step();

  // Value and gradient norm at the current assignment, appended as a final
  // history entry without moving the parameters.
  void record_current();

  const Assignment& current() const { return x_; }
  const History& history() const { return history_; }
  const std::vector<Variable>& active_variables() const { return active_; }

 private:
  Assignment gradient_point() const;
  std::vector<double> eval_gradient(const Assignment& at) const;
  void apply_update(const std::vector<double>& g);

  OptimizerConfig config_;
  CompiledObjective value_;
  std::vector<Variable> active_;
  std::vector<CompiledObjective> grad_;  // parallel to active_
  Assignment x_;
  History history_;
  unsigned iteration_ = 0;

  // Per-variable state, parallel to active_.
  std::vector<double> velocity_;  // momentum, nesterov
  std::vector<double> m_, s_;     // adam first/second moments, rmsprop mean square
  unsigned adam_t_ = 0;
};

// Gradient descent on the selected variables. Unset initial values default
// to 0.0. Gradient objectives are compiled once up front and reused across
// iterations. Throws on an empty variable set and on non-finite objective
// values (the message carries the offending assignment).
OptimizerResult minimize(const Objective& o, const OptimizerConfig& config = {},
                         const Assignment& initial = {},
                         std::optional<std::uint64_t> samples = std::nullopt,
                         std::optional<NoiseModel> noise = std::nullopt,
                         std::uint64_t seed = 0,
                         const SimulatorOptions& options = {});

// Central-difference derivative [O(v+step) - O(v-step)] / (2 step) as a new
// Objective, built by substituting v inside circuits and expression alike.
Objective numerical_gradient(const Objective& o, const Variable& v,
                             double step = 1e-4);

}  // namespace varqo
