#include "varqo/objective.hpp"

#include <deque>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "varqo/common.hpp"
#include "varqo/compiler.hpp"
#include "varqo/measurement.hpp"

namespace varqo {

namespace {

std::string hamiltonian_fingerprint(const QubitHamiltonian& h) {
  return h.simplified().to_string();
}

std::uint64_t ev_key(const ExpectationValue& ev) {
  std::size_t k = ev.circuit.structural_hash();
  detail::hash_combine(k, std::hash<std::string>{}(
                              hamiltonian_fingerprint(ev.hamiltonian)));
  detail::hash_combine(k, std::hash<bool>{}(ev.optimize_measurements));
  return k;
}

bool ev_equal(const ExpectationValue& a, const ExpectationValue& b) {
  return a.optimize_measurements == b.optimize_measurements &&
         a.circuit == b.circuit &&
         hamiltonian_fingerprint(a.hamiltonian) ==
             hamiltonian_fingerprint(b.hamiltonian);
}

// Process-wide intern table. Handles are indices; entries are never removed,
// so references stay valid and structurally equal values share a handle.
class EvPool {
 public:
  static EvPool& instance() {
    static EvPool pool;
    return pool;
  }

  std::uint64_t intern(ExpectationValue ev) {
    const std::uint64_t key = ev_key(ev);
    const std::lock_guard<std::mutex> lock(mutex_);
    auto& bucket = by_key_[key];
    for (std::uint64_t h : bucket)
      if (ev_equal(entries_[h].ev, ev)) return h;
    const std::uint64_t handle = entries_.size();
    entries_.push_back(Entry{std::move(ev), key});
    bucket.push_back(handle);
    return handle;
  }

  const ExpectationValue& get(std::uint64_t handle) const {
    const std::lock_guard<std::mutex> lock(mutex_);
    if (handle >= entries_.size())
      throw std::out_of_range("unknown expectation value handle");
    return entries_[handle].ev;
  }

  std::uint64_t key_of(std::uint64_t handle) const {
    const std::lock_guard<std::mutex> lock(mutex_);
    if (handle >= entries_.size())
      throw std::out_of_range("unknown expectation value handle");
    return entries_[handle].key;
  }

 private:
  struct Entry {
    ExpectationValue ev;
    std::uint64_t key;
  };

  mutable std::mutex mutex_;
  std::deque<Entry> entries_;
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> by_key_;
};

}  // namespace

const ExpectationValue& expectation_value(std::uint64_t handle) {
  return EvPool::instance().get(handle);
}

Objective::Objective(Expr expr) : expr_(std::move(expr)) {
  if (expr_.has_markers())
    throw std::invalid_argument(
        "objective expression contains unresolved gradient markers");
  for (std::uint64_t h : expr_.handles()) (void)expectation_value(h);
}

std::map<std::uint64_t, ExpectationValue> Objective::expectation_values()
    const {
  std::map<std::uint64_t, ExpectationValue> out;
  for (std::uint64_t h : expr_.handles()) out.emplace(h, expectation_value(h));
  return out;
}

std::set<Variable> Objective::extract_variables() const {
  std::set<Variable> vars = expr_.variables();
  for (std::uint64_t h : expr_.handles()) {
    const std::set<Variable> cv = expectation_value(h).circuit.extract_variables();
    vars.insert(cv.begin(), cv.end());
  }
  return vars;
}

Objective operator+(const Objective& a, const Objective& b) {
  return Objective(a.expr_ + b.expr_);
}
Objective operator-(const Objective& a, const Objective& b) {
  return Objective(a.expr_ - b.expr_);
}
Objective operator*(const Objective& a, const Objective& b) {
  return Objective(a.expr_ * b.expr_);
}
Objective operator/(const Objective& a, const Objective& b) {
  return Objective(a.expr_ / b.expr_);
}
Objective pow(const Objective& base, const Objective& exponent) {
  return Objective(pow(base.expr_, exponent.expr_));
}

Objective make_expectation(const QCircuit& circuit, const QubitHamiltonian& h,
                           bool optimize_measurements) {
  if (!h.is_hermitian())
    throw std::invalid_argument(
        "make_expectation: Hamiltonian is not Hermitian");
  const std::uint64_t handle = EvPool::instance().intern(
      ExpectationValue{circuit, h, optimize_measurements});
  return Objective(Expr::expectation(handle));
}

Objective substitute_variables(const Objective& o,
                               const std::map<Variable, Expr>& replacements) {
  std::map<std::uint64_t, std::uint64_t> remap;
  for (std::uint64_t h : o.handles()) {
    const ExpectationValue& ev = expectation_value(h);
    QCircuit replaced = ev.circuit.substitute_parameters(replacements);
    if (replaced == ev.circuit) continue;
    remap[h] = EvPool::instance().intern(ExpectationValue{
        std::move(replaced), ev.hamiltonian, ev.optimize_measurements});
  }
  Expr e = o.expr().substitute(replacements);
  if (!remap.empty())
    e = e.map_handles([&remap](std::uint64_t h) {
      auto it = remap.find(h);
      return it == remap.end() ? h : it->second;
    });
  return Objective(std::move(e));
}

namespace {

bool identity_generator(const Gate& g) {
  return g.tag == GateTag::ExpPauli &&
         g.generator->terms().front().factors().empty();
}

// d<H>/dv for one interned expectation value, as an expression over newly
// interned shifted expectation values.
Expr shift_rule_gradient(std::uint64_t handle, const Variable& v) {
  const ExpectationValue& ev = expectation_value(handle);
  const QCircuit compiled =
      compile_circuit(ev.circuit, CompilerConfig::gradient());
  const std::vector<Gate>& gs = compiled.gates();

  Expr sum(0.0);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    if (!gs[i].parameter) continue;
    const Expr theta = *gs[i].parameter;
    const Expr dtheta = theta.differentiate(v);
    if (dtheta.is_zero()) continue;
    if (!shift_rule_ready(gs[i]))
      throw std::invalid_argument(std::string("grad: gate ") +
                                  gate_tag_name(gs[i].tag) +
                                  " does not support the shift rule");
    // A parametrized global phase never moves an expectation value.
    if (identity_generator(gs[i])) continue;

    const auto shifted = [&](double delta) {
      std::vector<Gate> copy = gs;
      copy[i].parameter = theta + Expr::constant(delta);
      return Expr::expectation(EvPool::instance().intern(ExpectationValue{
          QCircuit(std::move(copy)), ev.hamiltonian, ev.optimize_measurements}));
    };
    sum = sum + dtheta * Expr::constant(0.5) *
                    (shifted(kPi / 2) - shifted(-kPi / 2));
  }
  return sum;
}

}  // namespace

Objective grad(const Objective& o, const Variable& v) {
  const Expr d = o.expr().differentiate(v);
  if (!d.has_markers()) return Objective(d);
  return Objective(d.resolve_markers(
      [](std::uint64_t handle, const Variable& var) {
        return shift_rule_gradient(handle, var);
      }));
}

double CompiledObjective::operator()(const Assignment& vars) const {
  return run(vars, samples_);
}

double CompiledObjective::operator()(const Assignment& vars,
                                     std::uint64_t samples) const {
  return run(vars, samples);
}

double CompiledObjective::run(const Assignment& vars,
                              std::optional<std::uint64_t> samples) const {
  stats_ = EvalStats{};
  HandleValues values;
  const NoiseModel* noise = noise_ ? &*noise_ : nullptr;
  for (const auto& [handle, circuit] : compiled_circuits_) {
    const ExpectationValue& ev = expectation_value(handle);
    double value;
    if (!samples) {
      value = expectation(circuit, ev.hamiltonian, vars, options_);
    } else {
      const auto groups = ev.optimize_measurements
                              ? group_qwc(ev.hamiltonian)
                              : singleton_groups(ev.hamiltonian);
      value = sample_expectation(
          circuit, groups, vars, *samples,
          detail::mix_seed(seed_, EvPool::instance().key_of(handle)), noise,
          options_);
    }
    values.emplace(handle, value);
    ++stats_.expectation_evaluations;
  }
  return objective_.expr().evaluate(vars, values);
}

CompiledObjective compile(const Objective& o,
                          std::optional<std::uint64_t> samples,
                          std::optional<NoiseModel> noise, std::uint64_t seed,
                          const SimulatorOptions& options) {
  if (noise && !samples)
    throw std::invalid_argument("compile: noise requires a sample count");
  CompiledObjective c;
  c.objective_ = o;
  for (std::uint64_t handle : o.handles())
    c.compiled_circuits_.emplace(
        handle, compile_circuit(expectation_value(handle).circuit,
                                CompilerConfig::gradient()));
  c.samples_ = samples;
  c.noise_ = std::move(noise);
  c.seed_ = seed;
  c.options_ = options;
  return c;
}

}  // namespace varqo
