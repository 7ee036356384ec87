// Command-line front end: sample curves and unitary paths, run design
// verification, and reproduce the robustness simulations. All quantities are
// dimensionless with the Rabi bound fixed at 1.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "udesign/control.hpp"
#include "udesign/design.hpp"
#include "udesign/io.hpp"
#include "udesign/qmat.hpp"
#include "udesign/sphere.hpp"
#include "udesign/upath.hpp"

namespace {

using namespace udesign;

constexpr double kOmega = 1.0;

axis3 parse_axis(const std::string& token) {
  if (token == "x") return axis3(1, 0, 0);
  if (token == "y") return axis3(0, 1, 0);
  if (token == "z") return axis3(0, 0, 1);
  if (token == "-x") return axis3(-1, 0, 0);
  if (token == "-y") return axis3(0, -1, 0);
  if (token == "-z") return axis3(0, 0, -1);
  std::stringstream ss(token);
  std::string cell;
  std::vector<double> parts;
  while (std::getline(ss, cell, ',')) parts.push_back(std::stod(cell));
  if (parts.size() != 3)
    throw std::invalid_argument("axis must be x|y|z|-x|-y|-z or a,b,c");
  Eigen::Vector3d v(parts[0], parts[1], parts[2]);
  if (v.norm() < 1e-12) throw std::invalid_argument("axis must be nonzero");
  return axis3(v.normalized());
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ':')) parts.push_back(std::stod(cell));
  if (parts.size() == 1) return {parts[0]};
  if (parts.size() < 2 || parts.size() > 3)
    throw std::invalid_argument("grid must be lo:hi[:step]");
  double lo = parts[0], hi = parts[1];
  double step = parts.size() == 3 ? parts[2] : 1.0;
  if (step <= 0.0 || hi < lo) throw std::invalid_argument("bad grid bounds");
  std::vector<double> grid;
  for (double v = lo; v <= hi + 1e-9; v += step) grid.push_back(v);
  return grid;
}

std::vector<int> parse_int_grid(const std::string& spec) {
  std::vector<int> out;
  for (double v : parse_grid(spec))
    out.push_back(static_cast<int>(std::lround(v)));
  return out;
}

unitary_op parse_target(const std::string& name) {
  // Pi rotations: the Pauli gates up to global phase, but with determinant 1.
  const complexd mi(0, -1);
  if (name == "I") return unitary_op(cmat::Identity(2, 2), true);
  if (name == "X") return unitary_op(mi * pauli_x(), true);
  if (name == "Y") return unitary_op(mi * pauli_y(), true);
  if (name == "Z") return unitary_op(mi * pauli_z(), true);
  throw std::invalid_argument("target must be one of I,X,Y,Z");
}

curve_spec parse_curve(const std::string& name, double phase, int d) {
  if (name == "xi") return curve_spec(curve_kind::xi);
  if (name == "gamma") return curve_spec(curve_kind::gamma);
  if (name == "gamma-tilde") return curve_spec(curve_kind::gamma_tilde);
  if (name == "xi-prime") return curve_spec(curve_kind::xi_prime);
  if (name == "gamma-prime") return curve_spec(curve_kind::gamma_prime);
  if (name == "gamma-tilde-prime")
    return curve_spec(curve_kind::gamma_tilde_prime);
  if (name == "xi-phase") return curve_spec(curve_kind::xi_phase, phase);
  if (name == "gamma-phase") return curve_spec(curve_kind::gamma_phase, phase);
  if (name == "gamma-tilde-phase")
    return curve_spec(curve_kind::gamma_tilde_phase, phase);
  if (name == "ladder")
    return curve_spec(curve_kind::harmonic_ladder, 0.0, d);
  throw std::invalid_argument("unknown curve kind: " + name);
}

struct path_options {
  std::string kind;
  std::string n1 = "z";
  std::string n2 = "y";
  int d = 3;
  int qubits = 2;
  std::string target = "Z";
};

struct built_path {
  unitary_path path;
  std::optional<double> s_star;
};

built_path build_path(const path_options& opt) {
  if (opt.kind == "two-axis")
    return {two_axis_path(parse_axis(opt.n1), parse_axis(opt.n2)),
            std::nullopt};
  if (opt.kind == "fixed-angle")
    return {fixed_angle_path(parse_axis(opt.n1), parse_axis(opt.n2)),
            std::nullopt};
  if (opt.kind == "tensor") {
    std::vector<std::pair<axis3, axis3>> axes(
        opt.qubits, {parse_axis(opt.n1), parse_axis(opt.n2)});
    return {tensor_qubit_path(axes), std::nullopt};
  }
  if (opt.kind == "fiber") return {fiber_path(opt.d), std::nullopt};
  if (opt.kind == "hw") return {hw_path(opt.d), std::nullopt};
  if (opt.kind == "open") {
    open_path opened =
        build_open_path(two_axis_path(parse_axis(opt.n1), parse_axis(opt.n2)),
                        parse_target(opt.target));
    return {opened.path, opened.s_star};
  }
  throw std::invalid_argument("unknown path kind: " + opt.kind);
}

pulse_program pulse_by_name(const std::string& name) {
  if (name == "urc") return urc_pulse(axis3(0, 0, 1), axis3(0, 1, 0), kOmega);
  if (name == "square") return composite_pulse(composite_kind::square, kOmega);
  if (name == "corpse") return composite_pulse(composite_kind::corpse, kOmega);
  if (name == "bb1") return composite_pulse(composite_kind::bb1, kOmega);
  throw std::invalid_argument("unknown pulse: " + name);
}

dd_kind dd_by_name(const std::string& name) {
  if (name == "urc") return dd_kind::urc_rep;
  if (name == "xy4") return dd_kind::xy4;
  if (name == "cpmg") return dd_kind::cpmg;
  throw std::invalid_argument("unknown sequence: " + name);
}

// ---------------------------------------------------------------------------

struct construct_args {
  std::string path_kind;
  std::string curve_kind;
  path_options popt;
  double phase = 0.0;
  int samples = 128;
  std::string project;
  std::string out;
};

int run_construct(const construct_args& a) {
  if (a.path_kind.empty() == a.curve_kind.empty())
    throw std::invalid_argument("pass exactly one of --path / --curve");

  run_manifest manifest;
  manifest.command = "construct";
  manifest.output = a.out;
  manifest.parameters["samples"] = std::to_string(a.samples);

  if (!a.curve_kind.empty()) {
    manifest.parameters["curve"] = a.curve_kind;
    manifest.parameters["phase"] = format_double(a.phase);
    manifest.parameters["d"] = std::to_string(a.popt.d);
    curve_spec spec = parse_curve(a.curve_kind, a.phase, a.popt.d);
    csv_table table;
    if (!a.project.empty()) {
      manifest.parameters["project"] = a.project;
      table = projected_curve_table(spec, a.samples, a.project);
    } else {
      table = curve_samples_table(spec, a.samples);
    }
    write_csv(a.out, table);
    json desc;
    desc["kind"] = a.curve_kind;
    desc["ambient_dim"] = curve_ambient_dim(spec);
    desc["closed"] = curve_is_closed(spec);
    desc["phase"] = a.phase;
    write_json(a.out + ".desc.json", desc);
  } else {
    manifest.parameters["path"] = a.path_kind;
    manifest.parameters["n1"] = a.popt.n1;
    manifest.parameters["n2"] = a.popt.n2;
    manifest.parameters["d"] = std::to_string(a.popt.d);
    manifest.parameters["qubits"] = std::to_string(a.popt.qubits);
    manifest.parameters["target"] = a.popt.target;
    path_options popt = a.popt;
    popt.kind = a.path_kind;
    built_path built = build_path(popt);
    write_csv(a.out, path_samples_table(built.path, a.samples));
    json desc = path_descriptor(built.path);
    if (built.s_star) desc["s_star"] = *built.s_star;
    write_json(a.out + ".desc.json", desc);
  }
  write_manifest(manifest);
  return 0;
}

struct verify_args {
  path_options popt;
  int n = 0;
  std::string scan;
  std::string out;
};

int run_verify(const verify_args& a) {
  if ((a.n > 0) == !a.scan.empty())
    throw std::invalid_argument("pass exactly one of --n / --scan");
  built_path built = build_path(a.popt);

  run_manifest manifest;
  manifest.command = "verify";
  manifest.parameters["path"] = a.popt.kind;
  manifest.parameters["n1"] = a.popt.n1;
  manifest.parameters["n2"] = a.popt.n2;
  manifest.parameters["d"] = std::to_string(a.popt.d);
  manifest.parameters["qubits"] = std::to_string(a.popt.qubits);
  manifest.parameters["target"] = a.popt.target;

  if (a.n > 0) {
    manifest.parameters["n"] = std::to_string(a.n);
    design_report report = analyze_ensemble(sample_path(built.path, a.n));
    std::cout << "n=" << a.n
              << " frame_potential=" << format_double(report.frame_potential_t1)
              << " twirl_deviation=" << format_double(report.twirl_deviation)
              << " verdict=" << (report.verdict ? "design" : "not-a-design")
              << "\n";
    if (!a.out.empty()) {
      manifest.output = a.out;
      write_json(a.out, report_to_json(report));
      write_manifest(manifest);
    }
    return 0;
  }

  manifest.parameters["scan"] = a.scan;
  if (a.out.empty())
    throw std::invalid_argument("--scan requires --out");
  manifest.output = a.out;
  csv_table table;
  table.header = {"n", "frame_potential"};
  for (auto [n, fp] : design_scan(built.path, parse_int_grid(a.scan)))
    table.add_row({static_cast<double>(n), fp});
  write_csv(a.out, table);
  write_manifest(manifest);
  return 0;
}

struct gate_args {
  std::string pulses = "urc,square,corpse,bb1";
  std::string eta = "0:0.3:0.03";
  int trials = 1000;
  std::uint64_t seed = 7;
  int steps = 2048;
  std::string out;
};

int run_gate(const gate_args& a) {
  monte_carlo_config mc(a.trials, a.seed);
  propagation_config cfg(a.steps);
  std::vector<double> grid = parse_grid(a.eta);

  csv_table table;
  table.header = {"pulse", "eta", "mean_fidelity", "std_error"};
  json mirror;
  mirror["metadata"] = {{"seed", a.seed},
                        {"trials", a.trials},
                        {"steps", a.steps},
                        {"pulses", a.pulses}};
  mirror["data"] = json::array();
  for (const std::string& name : split_list(a.pulses)) {
    pulse_program pulse = pulse_by_name(name);
    unitary_op target = noise_free_target(pulse);
    for (double eta : grid) {
      mc_result r = noise_averaged_fidelity(pulse, target, mc, eta, cfg);
      table.rows.push_back({name, format_double(eta), format_double(r.mean),
                            format_double(r.stderr_)});
      mirror["data"].push_back({{"pulse", name},
                                {"eta", eta},
                                {"mean_fidelity", r.mean},
                                {"std_error", r.stderr_}});
    }
  }
  write_csv(a.out, table);
  write_json(a.out + ".json", mirror);
  run_manifest manifest;
  manifest.command = "simulate gate";
  manifest.parameters = {{"pulses", a.pulses},
                         {"eta", a.eta},
                         {"trials", std::to_string(a.trials)},
                         {"steps", std::to_string(a.steps)}};
  manifest.seed = a.seed;
  manifest.output = a.out;
  write_manifest(manifest);
  return 0;
}

struct memory_args {
  std::string kinds = "urc,xy4,cpmg";
  int reps = 20;
  int trials = 100;
  double etamax = 0.05;
  double tau = 2.0 * M_PI / kOmega;
  std::uint64_t seed = 7;
  int steps = 2048;
  std::string out;
};

int run_memory(const memory_args& a) {
  monte_carlo_config mc(a.trials, a.seed);
  propagation_config cfg(a.steps);

  csv_table table;
  table.header = {"kind", "repetition", "mean_fidelity", "std_error"};
  json mirror;
  mirror["metadata"] = {{"seed", a.seed},
                        {"trials", a.trials},
                        {"steps", a.steps},
                        {"kinds", a.kinds},
                        {"eta_max", a.etamax},
                        {"tau", a.tau}};
  mirror["data"] = json::array();
  for (const std::string& name : split_list(a.kinds)) {
    auto points =
        memory_decay(dd_by_name(name), a.reps, a.tau, kOmega, mc, a.etamax,
                     cfg);
    for (const auto& p : points) {
      table.rows.push_back({name, std::to_string(p.repetition),
                            format_double(p.mean), format_double(p.stderr_)});
      mirror["data"].push_back({{"kind", name},
                                {"repetition", p.repetition},
                                {"mean_fidelity", p.mean},
                                {"std_error", p.stderr_}});
    }
  }
  write_csv(a.out, table);
  write_json(a.out + ".json", mirror);
  run_manifest manifest;
  manifest.command = "simulate memory";
  manifest.parameters = {{"kinds", a.kinds},
                         {"reps", std::to_string(a.reps)},
                         {"trials", std::to_string(a.trials)},
                         {"etamax", format_double(a.etamax)},
                         {"tau", format_double(a.tau)},
                         {"steps", std::to_string(a.steps)}};
  manifest.seed = a.seed;
  manifest.output = a.out;
  write_manifest(manifest);
  return 0;
}

struct ff_args {
  std::string pulses = "urc,square,corpse,bb1";
  std::string omega = "0:0.5:0.005";
  int samples = 0;
  std::string out;
};

int run_ff(const ff_args& a) {
  std::vector<double> grid = parse_grid(a.omega);
  csv_table table;
  table.header = {"pulse", "omega", "ff_x", "ff_y", "ff_z"};
  json mirror;
  mirror["metadata"] = {{"pulses", a.pulses},
                        {"omega", a.omega},
                        {"samples", a.samples}};
  mirror["data"] = json::array();
  for (const std::string& name : split_list(a.pulses)) {
    filter_result ff = filter_function(pulse_by_name(name), grid, a.samples);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      table.add_row({grid[j], ff.ff_x[j], ff.ff_y[j], ff.ff_z[j]});
      table.rows.back().insert(table.rows.back().begin(), name);
      mirror["data"].push_back({{"pulse", name},
                                {"omega", grid[j]},
                                {"ff_x", ff.ff_x[j]},
                                {"ff_y", ff.ff_y[j]},
                                {"ff_z", ff.ff_z[j]}});
    }
  }
  write_csv(a.out, table);
  write_json(a.out + ".json", mirror);
  run_manifest manifest;
  manifest.command = "simulate ff";
  manifest.parameters = {{"pulses", a.pulses},
                         {"omega", a.omega},
                         {"samples", std::to_string(a.samples)}};
  manifest.output = a.out;
  write_manifest(manifest);
  return 0;
}

struct project_args {
  std::string in;
  std::string map = "stereo";
  std::string out;
};

int run_project(const project_args& a) {
  csv_table src = read_csv(a.in);
  if (src.header.size() < 5 || src.header[0] != "s")
    throw std::invalid_argument(
        "input must be a curve csv with columns s,x1..x4");
  csv_table table;
  table.header = {"s", "px", "py", "pz"};
  for (const auto& row : src.rows) {
    Eigen::VectorXd x(4);
    for (int j = 0; j < 4; ++j) x(j) = std::stod(row[1 + j]);
    sphere_point p(x);
    Eigen::Vector3d q;
    if (a.map == "stereo") {
      q = stereographic_project(p);
    } else if (a.map == "hopf") {
      q = hopf_map(p).vec();
    } else {
      throw std::invalid_argument("unknown projection: " + a.map);
    }
    table.add_row({std::stod(row[0]), q(0), q(1), q(2)});
  }
  write_csv(a.out, table);
  run_manifest manifest;
  manifest.command = "project";
  manifest.parameters = {{"in", a.in}, {"map", a.map}};
  manifest.output = a.out;
  write_manifest(manifest);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous unitary 1-design paths and robust control"};
  app.require_subcommand(1);

  construct_args ca;
  CLI::App* construct = app.add_subcommand(
      "construct", "sample a curve or unitary path to csv");
  construct->add_option("--path", ca.path_kind,
                        "two-axis|fixed-angle|tensor|fiber|hw|open");
  construct->add_option("--curve", ca.curve_kind,
                        "xi|gamma|gamma-tilde|*-prime|*-phase|ladder");
  construct->add_option("--n1", ca.popt.n1, "first axis");
  construct->add_option("--n2", ca.popt.n2, "second axis");
  construct->add_option("--d", ca.popt.d, "dimension parameter");
  construct->add_option("--qubits", ca.popt.qubits, "tensor qubit count");
  construct->add_option("--target", ca.popt.target, "open-path target");
  construct->add_option("--phase", ca.phase, "family phase in [0, pi]");
  construct->add_option("--samples", ca.samples, "sample count");
  construct->add_option("--project", ca.project, "stereo|hopf (curves only)");
  construct->add_option("--out", ca.out, "output csv")->required();

  verify_args va;
  CLI::App* verify =
      app.add_subcommand("verify", "design diagnostics for a sampled path");
  verify->add_option("--path", va.popt.kind, "path kind")->required();
  verify->add_option("--n1", va.popt.n1, "first axis");
  verify->add_option("--n2", va.popt.n2, "second axis");
  verify->add_option("--d", va.popt.d, "dimension parameter");
  verify->add_option("--qubits", va.popt.qubits, "tensor qubit count");
  verify->add_option("--target", va.popt.target, "open-path target");
  verify->add_option("--n", va.n, "single sample count");
  verify->add_option("--scan", va.scan, "lo:hi[:step] sample counts");
  verify->add_option("--out", va.out, "output file");

  CLI::App* simulate = app.add_subcommand("simulate", "robustness protocols");
  simulate->require_subcommand(1);

  gate_args ga;
  CLI::App* gate = simulate->add_subcommand(
      "gate", "noise-averaged gate fidelity vs noise strength");
  gate->add_option("--pulses", ga.pulses, "comma list: urc,square,corpse,bb1");
  gate->add_option("--eta", ga.eta, "noise grid lo:hi:step");
  gate->add_option("--trials", ga.trials, "random directions per point");
  gate->add_option("--seed", ga.seed, "rng seed");
  gate->add_option("--steps", ga.steps, "integrator steps per segment");
  gate->add_option("--out", ga.out, "output csv")->required();

  memory_args ma;
  CLI::App* memory = simulate->add_subcommand(
      "memory", "quantum-memory fidelity vs sequence repetitions");
  memory->add_option("--kinds", ma.kinds, "comma list: urc,xy4,cpmg");
  memory->add_option("--reps", ma.reps, "max repetitions");
  memory->add_option("--trials", ma.trials, "noise realizations");
  memory->add_option("--etamax", ma.etamax, "max noise strength");
  memory->add_option("--tau", ma.tau, "free-evolution interval");
  memory->add_option("--seed", ma.seed, "rng seed");
  memory->add_option("--steps", ma.steps, "integrator steps per segment");
  memory->add_option("--out", ma.out, "output csv")->required();

  ff_args fa;
  CLI::App* ff = simulate->add_subcommand("ff", "first-order filter functions");
  ff->add_option("--pulses", fa.pulses, "comma list: urc,square,corpse,bb1");
  ff->add_option("--omega", fa.omega, "frequency grid lo:hi:step");
  ff->add_option("--samples", fa.samples, "time samples (0 = auto)");
  ff->add_option("--out", fa.out, "output csv")->required();

  project_args pa;
  CLI::App* project =
      app.add_subcommand("project", "project sampled S^3 curve csv to 3-D");
  project->add_option("--in", pa.in, "input csv")->required();
  project->add_option("--map", pa.map, "stereo|hopf");
  project->add_option("--out", pa.out, "output csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*construct) return run_construct(ca);
    if (*verify) return run_verify(va);
    if (*gate) return run_gate(ga);
    if (*memory) return run_memory(ma);
    if (*ff) return run_ff(fa);
    if (*project) return run_project(pa);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
