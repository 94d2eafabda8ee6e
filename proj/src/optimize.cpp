#include "varqo/optimize.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace varqo {

std::string opt_method_name(OptMethod m) {
  switch (m) {
    case OptMethod::Sgd: return "sgd";
    case OptMethod::Momentum: return "momentum";
    case OptMethod::Nesterov: return "nesterov";
    case OptMethod::Adam: return "adam";
    case OptMethod::Rmsprop: return "rmsprop";
  }
  throw std::logic_error("opt_method_name: unknown method");
}

OptMethod parse_opt_method(const std::string& name) {
  if (name == "sgd") return OptMethod::Sgd;
  if (name == "momentum") return OptMethod::Momentum;
  if (name == "nesterov") return OptMethod::Nesterov;
  if (name == "adam") return OptMethod::Adam;
  if (name == "rmsprop") return OptMethod::Rmsprop;
  throw std::invalid_argument("unknown optimizer method '" + name + "'");
}

GradientMode GradientMode::numerical(double step) {
  if (!(step > 0.0))
    throw std::invalid_argument("numerical gradient step must be positive");
  GradientMode g;
  g.kind = Kind::Numerical;
  g.step = step;
  return g;
}

GradientMode GradientMode::user(std::map<Variable, Objective> components) {
  GradientMode g;
  g.kind = Kind::Supplied;
  g.supplied = std::move(components);
  return g;
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::Maxiter: return "maxiter";
    case Termination::Gtol: return "gtol";
  }
  throw std::logic_error("termination_name: unknown reason");
}

namespace {

void format_value(std::ostream& os, double v) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
}

std::string describe_assignment(const Assignment& vars) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, value] : vars) {
    if (!first) os << ", ";
    first = false;
    os << v.to_string() << "=";
    format_value(os, value);
  }
  return os.str();
}

}  // namespace

std::string History::to_csv() const {
  std::set<Variable> columns;
  for (const HistoryEntry& e : entries)
    for (const auto& [v, value] : e.assignment) columns.insert(v);

  std::ostringstream os;
  os << "iteration,value,gradnorm";
  for (const Variable& v : columns) os << "," << v.to_string();
  os << "\n";
  for (const HistoryEntry& e : entries) {
    os << e.iteration << ",";
    format_value(os, e.value);
    os << ",";
    format_value(os, e.gradient_norm);
    for (const Variable& v : columns) {
      os << ",";
      auto it = e.assignment.find(v);
      format_value(os, it == e.assignment.end() ? 0.0 : it->second);
    }
    os << "\n";
  }
  return os.str();
}

Optimizer::Optimizer(const Objective& o, OptimizerConfig config,
                     const Assignment& initial,
                     std::optional<std::uint64_t> samples,
                     std::optional<NoiseModel> noise, std::uint64_t seed,
                     const SimulatorOptions& options)
    : config_(std::move(config)), value_(compile(o, samples, noise, seed, options)) {
  if (!(config_.lr > 0.0))
    throw std::invalid_argument("optimize: lr must be positive");

  const std::set<Variable> all = o.extract_variables();
  if (config_.variables) {
    for (const Variable& v : *config_.variables)
      if (all.find(v) == all.end())
        throw std::invalid_argument("optimize: '" + v.to_string() +
                                    "' is not a variable of the objective");
    active_.assign(config_.variables->begin(), config_.variables->end());
  } else {
    active_.assign(all.begin(), all.end());
  }
  if (active_.empty())
    throw std::invalid_argument("optimize: no variables to optimize");

  for (const Variable& v : all) x_[v] = 0.0;
  for (const auto& [v, value] : initial) x_[v] = value;

  grad_.reserve(active_.size());
  for (const Variable& v : active_) {
    Objective dv;
    switch (config_.gradient.kind) {
      case GradientMode::Kind::Analytic:
        dv = grad(o, v);
        break;
      case GradientMode::Kind::Numerical:
        dv = numerical_gradient(o, v, config_.gradient.step);
        break;
      case GradientMode::Kind::Supplied: {
        auto it = config_.gradient.supplied.find(v);
        if (it == config_.gradient.supplied.end())
          throw std::invalid_argument("optimize: no gradient supplied for '" +
                                      v.to_string() + "'");
        dv = it->second;
        break;
      }
    }
    grad_.push_back(compile(dv, samples, noise, seed, options));
  }

  velocity_.assign(active_.size(), 0.0);
  m_.assign(active_.size(), 0.0);
  s_.assign(active_.size(), 0.0);
}

Assignment Optimizer::gradient_point() const {
  if (config_.method != OptMethod::Nesterov) return x_;
  // Lookahead point x + mu*v; the velocity already carries the lr scale.
  Assignment pt = x_;
  for (std::size_t i = 0; i < active_.size(); ++i)
    pt[active_[i]] += config_.momentum * velocity_[i];
  return pt;
}

std::vector<double> Optimizer::eval_gradient(const Assignment& at) const {
  std::vector<double> g(active_.size(), 0.0);
  for (std::size_t i = 0; i < active_.size(); ++i) {
    g[i] = grad_[i](at);
    if (!std::isfinite(g[i]))
      throw std::runtime_error("optimize: non-finite gradient for '" +
                               active_[i].to_string() + "' at " +
                               describe_assignment(at));
  }
  return g;
}

void Optimizer::apply_update(const std::vector<double>& g) {
  const double lr = config_.lr;
  switch (config_.method) {
    case OptMethod::Sgd:
      for (std::size_t i = 0; i < active_.size(); ++i)
        x_[active_[i]] -= lr * g[i];
      break;
    case OptMethod::Momentum:
      // Heavy ball: v <- mu*v + g, x <- x - lr*v.
      for (std::size_t i = 0; i < active_.size(); ++i) {
        velocity_[i] = config_.momentum * velocity_[i] + g[i];
        x_[active_[i]] -= lr * velocity_[i];
      }
      break;
    case OptMethod::Nesterov:
      // v <- mu*v - lr*g(x + mu*v), x <- x + v; g was taken at the
      // lookahead point by step().
      for (std::size_t i = 0; i < active_.size(); ++i) {
        velocity_[i] = config_.momentum * velocity_[i] - lr * g[i];
        x_[active_[i]] += velocity_[i];
      }
      break;
    case OptMethod::Adam: {
      ++adam_t_;
      const double c1 = 1.0 - std::pow(config_.beta1, adam_t_);
      const double c2 = 1.0 - std::pow(config_.beta2, adam_t_);
      for (std::size_t i = 0; i < active_.size(); ++i) {
        m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g[i];
        s_[i] = config_.beta2 * s_[i] + (1.0 - config_.beta2) * g[i] * g[i];
        const double mhat = m_[i] / c1;
        const double shat = s_[i] / c2;
        x_[active_[i]] -= lr * mhat / (std::sqrt(shat) + config_.epsilon);
      }
      break;
    }
    case OptMethod::Rmsprop:
      for (std::size_t i = 0; i < active_.size(); ++i) {
        s_[i] = config_.decay * s_[i] + (1.0 - config_.decay) * g[i] * g[i];
        x_[active_[i]] -= lr * g[i] / (std::sqrt(s_[i]) + config_.epsilon);
      }
      break;
  }
}

double Optimizer::step() {
  const std::vector<double> g = eval_gradient(gradient_point());
  const double value = value_(x_);
  if (!std::isfinite(value))
    throw std::runtime_error("optimize: non-finite objective value at " +
                             describe_assignment(x_));
  double norm2 = 0.0;
  for (double gi : g) norm2 += gi * gi;
  history_.entries.push_back({iteration_, value, std::sqrt(norm2), x_});
  ++iteration_;
  apply_update(g);
  return value;
}

void Optimizer::record_current() {
  const std::vector<double> g = eval_gradient(x_);
  const double value = value_(x_);
  if (!std::isfinite(value))
    throw std::runtime_error("optimize: non-finite objective value at " +
                             describe_assignment(x_));
  double norm2 = 0.0;
  for (double gi : g) norm2 += gi * gi;
  history_.entries.push_back({iteration_, value, std::sqrt(norm2), x_});
}

OptimizerResult minimize(const Objective& o, const OptimizerConfig& config,
                         const Assignment& initial,
                         std::optional<std::uint64_t> samples,
                         std::optional<NoiseModel> noise, std::uint64_t seed,
                         const SimulatorOptions& options) {
  if (config.maxiter == 0)
    throw std::invalid_argument("optimize: maxiter must be positive");

  Optimizer opt(o, config, initial, samples, noise, seed, options);
  Termination reason = Termination::Maxiter;
  for (unsigned it = 0; it < config.maxiter; ++it) {
    opt.step();
    if (config.gtol > 0.0 &&
        opt.history().back().gradient_norm < config.gtol) {
      reason = Termination::Gtol;
      break;
    }
  }
  opt.record_current();

  OptimizerResult result;
  result.history = opt.history();
  result.termination = reason;
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.history.entries.size(); ++i)
    if (result.history.entries[i].value < result.history.entries[best].value)
      best = i;
  result.best_value = result.history.entries[best].value;
  result.best_assignment = result.history.entries[best].assignment;
  return result;
}

Objective numerical_gradient(const Objective& o, const Variable& v,
                             double step) {
  if (!(step > 0.0))
    throw std::invalid_argument("numerical_gradient: step must be positive");
  const Expr shifted_up = Expr(v) + Expr(step);
  const Expr shifted_down = Expr(v) - Expr(step);
  const Objective plus = substitute_variables(o, {{v, shifted_up}});
  const Objective minus = substitute_variables(o, {{v, shifted_down}});
  return (plus - minus) / Objective(2.0 * step);
}

}  // namespace varqo
