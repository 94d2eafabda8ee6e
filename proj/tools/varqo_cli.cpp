// varqo: command-line front end for the library. Subcommands cover circuit
// simulation, expectation values, VQE, sequential excited states, the
// single-qubit data-reuploading classifier, and state fidelities. Every
// subcommand is deterministic under a fixed --seed and exits nonzero with a
// one-line diagnostic on error.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "varqo/chemistry.hpp"
#include "varqo/compiler.hpp"
#include "varqo/objective.hpp"
#include "varqo/optimize.hpp"
#include "varqo/pauli.hpp"
#include "varqo/simulator.hpp"
#include "varqo/wavefunction.hpp"

namespace {

using namespace varqo;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Full precision so equal seeds print byte-identical output and values
// round-trip exactly.
std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return out.str();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

// "--var a=0.5 --var b=1,c=2" style items into an Assignment.
Assignment parse_assignment(const std::vector<std::string>& items) {
  Assignment vars;
  for (const auto& item : items) {
    for (const auto& entry : split(item, ',')) {
      if (entry.empty()) continue;
      auto eq = entry.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::runtime_error("expected name=value, got '" + entry + "'");
      vars[Variable::parse(entry.substr(0, eq))] =
          std::stod(entry.substr(eq + 1));
    }
  }
  return vars;
}

CompilerConfig compiler_config(const std::string& passes) {
  CompilerConfig config;
  for (const auto& name : split(passes, ',')) {
    if (name.empty()) continue;
    if (name == "all")
      config = CompilerConfig::all();
    else if (name == "generalized_rotation")
      config.generalized_rotation = true;
    else if (name == "multi_control")
      config.multi_control = true;
    else if (name == "exp_pauli")
      config.exp_pauli = true;
    else if (name == "power")
      config.power = true;
    else if (name == "controlled_rotation")
      config.controlled_rotation = true;
    else
      throw std::runtime_error(
          "unknown compiler pass '" + name +
          "' (expected generalized_rotation, multi_control, exp_pauli, "
          "power, controlled_rotation, or all)");
  }
  return config;
}

// "analytic", "numerical", or "numerical:STEP".
GradientMode gradient_mode(const std::string& text) {
  if (text == "analytic") return GradientMode::analytic();
  if (text == "numerical") return GradientMode::numerical(1e-4);
  if (text.rfind("numerical:", 0) == 0)
    return GradientMode::numerical(std::stod(text.substr(10)));
  throw std::runtime_error("unknown gradient mode '" + text +
                           "' (expected analytic or numerical[:step])");
}

std::optional<std::uint64_t> shot_count(std::uint64_t samples) {
  if (samples == 0) return std::nullopt;
  return samples;
}

std::optional<NoiseModel> load_noise(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return NoiseModel::from_json_text(read_file(path));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

// Projector onto |0...0> of an n-qubit register.
QubitHamiltonian zero_projector(unsigned n_qubits) {
  QubitHamiltonian p = QubitHamiltonian::identity();
  for (unsigned q = 0; q < n_qubits; ++q) p = p * paulis_qp(q);
  return p;
}

// Shared execution flags; not every subcommand registers all of them.
struct RunFlags {
  std::vector<std::string> vars;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::string noise;
  std::string passes;
  std::string out;
};

struct OptFlags {
  std::string method = "adam";
  double lr = 0.1;
  unsigned maxiter = 100;
  double gtol = 0.0;
  std::string gradient = "analytic";
  std::vector<std::string> init;

  OptimizerConfig config() const {
    OptimizerConfig c;
    c.method = parse_opt_method(method);
    c.lr = lr;
    c.maxiter = maxiter;
    c.gtol = gtol;
    c.gradient = gradient_mode(gradient);
    return c;
  }
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_compile = true) {
  cmd->add_option("--var", f.vars, "variable assignment name=value");
  cmd->add_option("--samples", f.samples, "shots per expectation; 0 = exact");
  cmd->add_option("--seed", f.seed, "random seed for sampling");
  cmd->add_option("--noise", f.noise, "noise model JSON file");
  if (with_compile)
    cmd->add_option("--compile", f.passes, "comma-separated compiler passes");
}

void add_opt_flags(CLI::App* cmd, OptFlags& f) {
  cmd->add_option("--method", f.method, "sgd, momentum, nesterov, adam, rmsprop");
  cmd->add_option("--lr", f.lr, "learning rate");
  cmd->add_option("--maxiter", f.maxiter, "iteration budget");
  cmd->add_option("--gtol", f.gtol, "stop when |grad| < gtol; 0 disables");
  cmd->add_option("--gradient", f.gradient, "analytic or numerical[:step]");
  cmd->add_option("--init", f.init, "initial value name=value (default 0)");
}

// Check every explicitly initialized name against the objective.
Assignment initial_values(const std::vector<std::string>& items,
                          const Objective& o) {
  Assignment initial = parse_assignment(items);
  auto known = o.extract_variables();
  for (const auto& [v, value] : initial)
    if (!known.count(v))
      throw std::runtime_error("--init: '" + v.to_string() +
                               "' is not a variable of the objective");
  return initial;
}

int run_simulate(const std::string& circuit_path, const RunFlags& f,
                 const std::string& initial_state) {
  QCircuit circuit =
      compile_circuit(QCircuit::from_text(read_file(circuit_path)),
                      compiler_config(f.passes));
  Assignment vars = parse_assignment(f.vars);
  if (f.samples == 0) {
    if (!f.noise.empty())
      throw std::runtime_error("--noise requires --samples");
    StateVector state;
    if (initial_state.empty()) {
      state = simulate(circuit, vars);
    } else {
      state = simulate(circuit, vars,
                       QubitWaveFunction::parse(initial_state));
    }
    QubitWaveFunction w = state.to_wavefunction();
    std::cout << w.to_string() << "\n";
    if (!f.out.empty()) {
      auto out = open_out(f.out);
      out << "basis,re,im\n";
      for (const auto& [index, amp] : w.amplitudes())
        out << QubitWaveFunction::bits_of(index, w.n_qubits()) << ','
            << fmt(amp.real()) << ',' << fmt(amp.imag()) << "\n";
    }
    return 0;
  }
  auto noise = load_noise(f.noise);
  SampleResult result = sample(circuit, vars, f.samples, f.seed,
                               noise ? &*noise : nullptr);
  std::cout << result.to_string() << "\n";
  if (!f.out.empty()) {
    auto out = open_out(f.out);
    out << "bitstring,count\n";
    for (const auto& [bits, n] : result.counts) out << bits << ',' << n << "\n";
  }
  return 0;
}

int run_expect(const std::string& circuit_path, const std::string& ham,
               const std::string& ham_file, const RunFlags& f, bool group) {
  if (ham.empty() == ham_file.empty())
    throw std::runtime_error(
        "expect: exactly one of --hamiltonian/--hamiltonian-file is required");
  QubitHamiltonian h =
      QubitHamiltonian::parse(ham.empty() ? read_file(ham_file) : ham);
  QCircuit circuit =
      compile_circuit(QCircuit::from_text(read_file(circuit_path)),
                      compiler_config(f.passes));
  Objective o = make_expectation(circuit, h, group);
  CompiledObjective value =
      compile(o, shot_count(f.samples), load_noise(f.noise), f.seed);
  std::cout << fmt(value(parse_assignment(f.vars))) << "\n";
  return 0;
}

// minimize(), except that maxiter 0 degenerates to a single evaluation at
// the initial point (no update, one history entry).
OptimizerResult minimize_or_probe(const Objective& o,
                                  const OptimizerConfig& config,
                                  const Assignment& initial,
                                  const RunFlags& f) {
  auto samples = shot_count(f.samples);
  auto noise = load_noise(f.noise);
  if (config.maxiter > 0)
    return minimize(o, config, initial, samples, noise, f.seed);
  Optimizer probe(o, config, initial, samples, noise, f.seed);
  probe.record_current();
  OptimizerResult result;
  result.history = probe.history();
  result.best_value = result.history.back().value;
  result.best_assignment = result.history.back().assignment;
  result.termination = Termination::Maxiter;
  return result;
}

void print_result(const OptimizerResult& result) {
  std::cout << "final_energy " << fmt(result.best_value) << "\n"
            << "evaluations " << result.history.size() << "\n"
            << "termination " << termination_name(result.termination) << "\n";
  for (const auto& [v, value] : result.best_assignment)
    std::cout << "variable " << v.to_string() << ' ' << fmt(value) << "\n";
}

int run_vqe(const std::string& molecule_path, const std::string& ansatz,
            unsigned layers, bool no_singles, const OptFlags& opt,
            const RunFlags& f, bool group) {
  if (ansatz != "upccgsd")
    throw std::runtime_error("vqe: unknown ansatz '" + ansatz +
                             "' (expected upccgsd)");
  Molecule mol = Molecule::load_file(molecule_path);
  QCircuit u = make_upccgsd_ansatz(mol, layers, !no_singles);
  Objective o = make_expectation(u, make_hamiltonian(mol), group);
  OptimizerResult result =
      minimize_or_probe(o, opt.config(), initial_values(opt.init, o), f);
  print_result(result);
  if (!f.out.empty()) open_out(f.out) << result.history.to_csv();
  return 0;
}

Variable relabel(const Variable& v, unsigned round) {
  std::string tag = "r" + std::to_string(round);
  return Variable(v.name, v.label.empty() ? tag : v.label + "." + tag);
}

int run_excited(const std::string& molecule_path, const std::string& ham,
                const std::string& ham_file, const std::string& circuit_path,
                const std::string& ansatz, unsigned layers, bool no_singles,
                unsigned n_states, const OptFlags& opt, const RunFlags& f) {
  if (n_states == 0) throw std::runtime_error("excited: --n-states must be >= 1");
  bool have_ham = !ham.empty() || !ham_file.empty();
  if (molecule_path.empty() == !have_ham)
    throw std::runtime_error(
        "excited: exactly one of --molecule or --hamiltonian[-file] is "
        "required");

  QubitHamiltonian h;
  QCircuit u;
  if (!molecule_path.empty()) {
    if (ansatz != "upccgsd")
      throw std::runtime_error("excited: unknown ansatz '" + ansatz +
                               "' (expected upccgsd)");
    Molecule mol = Molecule::load_file(molecule_path);
    h = make_hamiltonian(mol);
    u = make_upccgsd_ansatz(mol, layers, !no_singles);
  } else {
    if (circuit_path.empty())
      throw std::runtime_error("excited: --hamiltonian requires --circuit");
    h = QubitHamiltonian::parse(ham.empty() ? read_file(ham_file) : ham);
    u = QCircuit::from_text(read_file(circuit_path));
  }

  std::vector<std::pair<double, QCircuit>> previous;
  std::vector<double> energies;
  for (unsigned round = 0; round < n_states; ++round) {
    QCircuit u_round = u;
    if (round > 0) {
      std::map<Variable, Variable> renaming;
      for (const auto& v : u.extract_variables())
        renaming[v] = relabel(v, round);
      u_round = u.map_variables(renaming);
    }
    Objective o = make_projected_objective(h, u_round, previous);

    // --init names refer to the base circuit; map them into this round.
    Assignment initial;
    auto known = o.extract_variables();
    for (const auto& [v, value] : parse_assignment(opt.init)) {
      Variable mapped = round == 0 ? v : relabel(v, round);
      if (!known.count(mapped))
        throw std::runtime_error("--init: '" + v.to_string() +
                                 "' is not a variable of the ansatz");
      initial[mapped] = value;
    }
    OptimizerResult result = minimize_or_probe(o, opt.config(), initial, f);
    std::cout << "state " << round << " energy " << fmt(result.best_value)
              << "\n";
    for (const auto& [v, value] : result.best_assignment)
      std::cout << "variable " << v.to_string() << ' ' << fmt(value) << "\n";

    // Deflate this state in later rounds: bake the optimum into the circuit.
    std::map<Variable, Expr> frozen;
    for (const auto& [v, value] : result.best_assignment)
      frozen[v] = Expr(value);
    previous.emplace_back(result.best_value,
                          u_round.substitute_parameters(frozen));
    energies.push_back(result.best_value);
  }
  if (!f.out.empty()) {
    auto out = open_out(f.out);
    out << "state,energy\n";
    for (std::size_t i = 0; i < energies.size(); ++i)
      out << i << ',' << fmt(energies[i]) << "\n";
  }
  return 0;
}

struct DataPoint {
  double x0 = 0.0, x1 = 0.0;
  int label = 0;
};

// Uniform points on [-1,1]^2; label 1 inside the circle of area 2 (radius
// sqrt(2/pi)), so the classes are balanced in expectation.
std::vector<DataPoint> make_dataset(std::size_t n, std::uint64_t seed,
                                    std::uint64_t stream) {
  std::uint64_t state = detail::mix_seed(seed, stream);
  std::vector<DataPoint> points(n);
  for (auto& p : points) {
    p.x0 = 2.0 * detail::uniform01(detail::splitmix64(state)) - 1.0;
    p.x1 = 2.0 * detail::uniform01(detail::splitmix64(state)) - 1.0;
    p.label = (p.x0 * p.x0 + p.x1 * p.x1 <= 2.0 / M_PI) ? 1 : 0;
  }
  return points;
}

// One data-reuploading layer per l: Ry(x0 + theta_l_0) then Rz(x1 + theta_l_1),
// all on qubit 0.
QCircuit classifier_circuit(unsigned layers, const DataPoint& p) {
  QCircuit u;
  for (unsigned l = 0; l < layers; ++l) {
    std::string tag = std::to_string(l);
    u += gates::Ry(Expr(Variable("theta" + tag + "_0")) + Expr(p.x0), 0);
    u += gates::Rz(Expr(Variable("theta" + tag + "_1")) + Expr(p.x1), 0);
  }
  return u;
}

// L = sum_i (1 - <P_label>)^2 with P_0/P_1 projecting onto |0>/|1>.
Objective classifier_loss(unsigned layers, const std::vector<DataPoint>& points) {
  Objective loss(0.0);
  for (const auto& p : points) {
    QubitHamiltonian target = p.label ? paulis_qm(0) : paulis_qp(0);
    Objective fidelity = make_expectation(classifier_circuit(layers, p), target);
    loss = loss + pow(Objective(1.0) - fidelity, Objective(2.0));
  }
  return loss;
}

int run_classify(unsigned layers, std::size_t train_n, std::size_t test_n,
                 const OptFlags& opt, const RunFlags& f) {
  if (layers < 1) throw std::runtime_error("classify: --layers must be >= 1");
  auto train = make_dataset(train_n, f.seed, 1);
  auto test = make_dataset(test_n, f.seed, 2);

  Objective loss = classifier_loss(layers, train);
  Assignment theta;
  for (const auto& v : loss.extract_variables()) theta[v] = 0.0;

  double initial_loss = compile(loss)(theta);
  double final_loss = initial_loss;
  if (opt.maxiter > 0) {
    OptimizerResult result = minimize(loss, opt.config(), theta);
    theta = result.best_assignment;
    final_loss = result.best_value;
  }

  std::size_t correct = 0;
  std::vector<std::pair<DataPoint, double>> scored;
  scored.reserve(test.size());
  for (const auto& p : test) {
    double score = expectation(classifier_circuit(layers, p), paulis_qm(0), theta);
    int predicted = score > 0.5 ? 1 : 0;
    if (predicted == p.label) ++correct;
    scored.emplace_back(p, score);
  }
  double accuracy = double(correct) / double(test.size());

  std::cout << "train_points " << train.size() << "\n"
            << "test_points " << test.size() << "\n"
            << "initial_loss " << fmt(initial_loss) << "\n"
            << "final_loss " << fmt(final_loss) << "\n"
            << "test_accuracy " << fmt(accuracy) << "\n";
  for (const auto& [v, value] : theta)
    std::cout << "variable " << v.to_string() << ' ' << fmt(value) << "\n";
  if (!f.out.empty()) {
    auto out = open_out(f.out);
    out << "x0,x1,label,score,predicted\n";
    for (const auto& [p, score] : scored)
      out << fmt(p.x0) << ',' << fmt(p.x1) << ',' << p.label << ','
          << fmt(score) << ',' << (score > 0.5 ? 1 : 0) << "\n";
  }
  return 0;
}

int run_fidelity(const std::string& circuit_path, const std::string& state,
                 const std::string& state_file, const std::string& ref_path,
                 const std::string& strategy, const RunFlags& f) {
  int sources = !state.empty() + !state_file.empty() + !ref_path.empty();
  if (sources != 1)
    throw std::runtime_error(
        "fidelity: exactly one of --state/--state-file/--ref-circuit is "
        "required");
  QCircuit u = QCircuit::from_text(read_file(circuit_path));
  Assignment vars = parse_assignment(f.vars);
  auto samples = shot_count(f.samples);
  auto noise = load_noise(f.noise);

  Objective o;
  if (strategy == "projector") {
    QubitWaveFunction reference;
    if (!ref_path.empty()) {
      reference = simulate(QCircuit::from_text(read_file(ref_path)), vars)
                      .to_wavefunction();
    } else {
      reference = QubitWaveFunction::parse(
          state.empty() ? read_file(state_file) : state);
    }
    o = make_expectation(u, projector(reference));
  } else if (strategy == "circuit") {
    if (ref_path.empty())
      throw std::runtime_error(
          "fidelity: the circuit strategy requires --ref-circuit");
    QCircuit ref = QCircuit::from_text(read_file(ref_path));
    QCircuit overlap = ref + u.dagger();
    o = make_expectation(overlap, zero_projector(overlap.n_qubits()));
  } else {
    throw std::runtime_error("fidelity: unknown strategy '" + strategy +
                             "' (expected projector or circuit)");
  }
  std::cout << fmt(compile(o, samples, noise, f.seed)(vars)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational quantum objectives: simulate, measure, optimize"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a circuit file");
  std::string sim_circuit, sim_initial;
  RunFlags sim_flags;
  sim->add_option("--circuit", sim_circuit, "circuit text file")->required();
  sim->add_option("--initial", sim_initial, "initial state, e.g. \"1.0|01>\"");
  sim->add_option("--out", sim_flags.out, "write amplitudes/counts CSV here");
  add_run_flags(sim, sim_flags);

  auto* exp = app.add_subcommand("expect", "expectation value of a circuit");
  std::string exp_circuit, exp_ham, exp_ham_file;
  bool exp_group = false;
  RunFlags exp_flags;
  exp->add_option("--circuit", exp_circuit, "circuit text file")->required();
  exp->add_option("--hamiltonian", exp_ham, "operator, e.g. \"Z(0) + 0.5*X(1)\"");
  exp->add_option("--hamiltonian-file", exp_ham_file, "operator text file");
  exp->add_flag("--group", exp_group, "measure qubit-wise commuting groups");
  add_run_flags(exp, exp_flags);

  auto* vqe = app.add_subcommand("vqe", "ground-state search for a molecule");
  std::string vqe_molecule, vqe_ansatz = "upccgsd";
  unsigned vqe_layers = 1;
  bool vqe_no_singles = false, vqe_group = false;
  OptFlags vqe_opt;
  RunFlags vqe_flags;
  vqe->add_option("--molecule", vqe_molecule, "molecule JSON file")->required();
  vqe->add_option("--ansatz", vqe_ansatz, "ansatz family (upccgsd)");
  vqe->add_option("--layers", vqe_layers, "ansatz repetitions");
  vqe->add_flag("--no-singles", vqe_no_singles, "drop the singles gates");
  vqe->add_flag("--group", vqe_group, "measure qubit-wise commuting groups");
  vqe->add_option("--out", vqe_flags.out, "write the optimization history CSV");
  add_opt_flags(vqe, vqe_opt);
  add_run_flags(vqe, vqe_flags, false);

  auto* exc = app.add_subcommand("excited", "sequential low-lying eigenstates");
  std::string exc_molecule, exc_ham, exc_ham_file, exc_circuit;
  std::string exc_ansatz = "upccgsd";
  unsigned exc_layers = 1, exc_n_states = 1;
  bool exc_no_singles = false;
  OptFlags exc_opt;
  RunFlags exc_flags;
  exc->add_option("--molecule", exc_molecule, "molecule JSON file");
  exc->add_option("--hamiltonian", exc_ham, "operator text (with --circuit)");
  exc->add_option("--hamiltonian-file", exc_ham_file, "operator text file");
  exc->add_option("--circuit", exc_circuit, "ansatz circuit for --hamiltonian");
  exc->add_option("--ansatz", exc_ansatz, "ansatz family for --molecule");
  exc->add_option("--layers", exc_layers, "ansatz repetitions");
  exc->add_flag("--no-singles", exc_no_singles, "drop the singles gates");
  exc->add_option("--n-states", exc_n_states, "number of states, lowest first");
  exc->add_option("--out", exc_flags.out, "write the state,energy CSV");
  add_opt_flags(exc, exc_opt);
  add_run_flags(exc, exc_flags, false);

  auto* cls = app.add_subcommand("classify",
                                 "train the single-qubit circle classifier");
  unsigned cls_layers = 3;
  std::size_t cls_train = 400, cls_test = 1000;
  OptFlags cls_opt;
  cls_opt.method = "rmsprop";
  cls_opt.lr = 0.05;
  cls_opt.maxiter = 300;
  RunFlags cls_flags;
  cls->add_option("--layers", cls_layers, "data-reuploading layers");
  cls->add_option("--train", cls_train, "training set size");
  cls->add_option("--test", cls_test, "test set size");
  cls->add_option("--seed", cls_flags.seed, "dataset seed");
  cls->add_option("--out", cls_flags.out, "write the test-set decision CSV");
  add_opt_flags(cls, cls_opt);

  auto* fid = app.add_subcommand("fidelity",
                                 "overlap of a circuit with a reference state");
  std::string fid_circuit, fid_state, fid_state_file, fid_ref;
  std::string fid_strategy = "projector";
  RunFlags fid_flags;
  fid->add_option("--circuit", fid_circuit, "circuit text file")->required();
  fid->add_option("--state", fid_state, "reference state, e.g. \"1|00>+1|11>\"");
  fid->add_option("--state-file", fid_state_file, "reference state text file");
  fid->add_option("--ref-circuit", fid_ref, "circuit preparing the reference");
  fid->add_option("--strategy", fid_strategy, "projector or circuit");
  add_run_flags(fid, fid_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sim->parsed()) return run_simulate(sim_circuit, sim_flags, sim_initial);
    if (exp->parsed())
      return run_expect(exp_circuit, exp_ham, exp_ham_file, exp_flags,
                        exp_group);
    if (vqe->parsed())
      return run_vqe(vqe_molecule, vqe_ansatz, vqe_layers, vqe_no_singles,
                     vqe_opt, vqe_flags, vqe_group);
    if (exc->parsed())
      return run_excited(exc_molecule, exc_ham, exc_ham_file, exc_circuit,
                         exc_ansatz, exc_layers, exc_no_singles, exc_n_states,
                         exc_opt, exc_flags);
    if (cls->parsed()) return run_classify(cls_layers, cls_train, cls_test,
                                           cls_opt, cls_flags);
    if (fid->parsed())
      return run_fidelity(fid_circuit, fid_state, fid_state_file, fid_ref,
                          fid_strategy, fid_flags);
  } catch (const std::exception& e) {
    std::cerr << "varqo: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
