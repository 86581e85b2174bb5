// ktoda: simulate the four-banded full Kostant-Toda lattice, sweep its block
// resolvent, dump moments and polynomials, and run the verification suite.
//
// Exit codes: 0 success, 1 check failure, 2 configuration error,
// 3 numerical abort.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ktoda/io.hpp"
#include "ktoda/lax_dynamics.hpp"
#include "ktoda/moments.hpp"
#include "ktoda/polynomials.hpp"
#include "ktoda/resolvent.hpp"
#include "ktoda/verify_harness.hpp"

namespace {

using namespace ktoda;
using Json = nlohmann::json;

enum Exit { kOk = 0, kCheckFailure = 1, kConfigError = 2, kNumericalAbort = 3 };

struct RunConfig {
  std::uint64_t seed = 1;
  std::string from;
  std::size_t m = 16;
  double h = 1e-3;
  double t_end = 1.0;
  std::size_t n_max = 4;
  double c_floor = 1e-12;
  std::string control = "none";
  double magnitude = 1.0;
  std::size_t seeds = 10;
  bool quick = false;
  bool no_stress = false;
  bool no_convergence = false;
  std::size_t jobs = 1;
  std::string out = "-";
  std::string state_out;
  std::size_t angles = 16;
  double radius_factor = 2.0;
  std::size_t t_samples = 9;
  double tol = 1e-14;
  bool corollary1 = false;
  bool timings = false;
};

// Command-line values; App::given tells which were set explicitly.
struct Flags {
  RunConfig values;
  std::string config_path;
};

// Flattens one level of nested sections so that {"integrator": {"h": ..}}
// and {"h": ..} are equivalent.
Json flatten(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
  Json flat = Json::object();
  for (const auto& [key, value] : j.items()) {
    if (value.is_object())
      for (const auto& [inner, v] : value.items()) flat[inner] = v;
    else
      flat[key] = value;
  }
  return flat;
}

template <class T>
void take(const Json& cfg, const char* key, T& target) {
  if (!cfg.contains(key)) return;
  try {
    target = cfg.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InvalidArgument(std::string(key) + ": wrong type in config file");
  }
}

class App {
 public:
  App() : app_("ktoda: four-banded full Kostant-Toda lattice simulation and checks") {
    app_.set_help_flag("--help", "print this help and exit");
    app_.require_subcommand(1);
    app_.set_version_flag("--version", "ktoda 1.0.0");

    auto* simulate = app_.add_subcommand("simulate", "integrate an instance and write a CSV trajectory");
    instance_options(simulate);
    simulate->add_option("--state-out", flags_.values.state_out,
                         "write the initial state as JSON (for --from)");
    simulate->add_option("--control", flags_.values.control,
                         "flow distortion: none, freeze-b, scale-c-rhs, drop-commutator-term");
    simulate->add_option("--magnitude", flags_.values.magnitude, "distortion magnitude");

    auto* verify = app_.add_subcommand("verify", "run the verification suite");
    common_options(verify);
    verify->add_option("--seed", flags_.values.seed, "run a single seed");
    verify->add_option("--seeds", flags_.values.seeds, "number of seeds 1..N");
    verify->add_flag("--quick", flags_.values.quick, "three seeds only");
    verify->add_option("--control", flags_.values.control, "negative control flow");
    verify->add_option("--magnitude", flags_.values.magnitude, "distortion magnitude");
    verify->add_option("--jobs", flags_.values.jobs, "worker threads");
    verify->add_option("--angles", flags_.values.angles, "points on the z ring");
    verify->add_option("--radius-factor", flags_.values.radius_factor, "|z| / rho");
    verify->add_option("--t-samples", flags_.values.t_samples, "interior sample times");
    verify->add_flag("--no-stress", flags_.values.no_stress, "skip the t = 2 closed-form run");
    verify->add_flag("--no-convergence", flags_.values.no_convergence, "skip the order study");
    verify->add_flag("--timings", flags_.values.timings, "include runtimes in the report");

    auto* resolvent = app_.add_subcommand("resolvent", "sweep R_J(z) over a z ring and sample times");
    instance_options(resolvent);
    resolvent->add_option("--angles", flags_.values.angles, "points on the z ring");
    resolvent->add_option("--radius-factor", flags_.values.radius_factor, "|z| / rho");
    resolvent->add_option("--t-samples", flags_.values.t_samples, "sample times in [0, t_end]");
    resolvent->add_option("--tol", flags_.values.tol, "Neumann tail tolerance");
    resolvent->add_flag("--corollary1", flags_.values.corollary1, "add closed-form columns");

    auto* moments = app_.add_subcommand("moments", "dump U(z^k P_0) of J(t_end) as JSON");
    instance_options(moments);

    auto* polys = app_.add_subcommand("polys", "dump P_n and B_n of J(t_end) as JSON");
    instance_options(polys);

    for (auto* sub : app_.get_subcommands({}))
      for (auto* opt : sub->get_options()) options_.push_back(opt);
  }

  int run(int argc, char** argv) {
    try {
      app_.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app_.exit(e);
      return code == 0 ? kOk : kConfigError;
    }
    try {
      const RunConfig cfg = resolve();
      auto* sub = app_.get_subcommands().front();
      const std::string name = sub->get_name();
      if (name == "simulate") return cmd_simulate(cfg);
      if (name == "verify") return cmd_verify(cfg);
      if (name == "resolvent") return cmd_resolvent(cfg);
      if (name == "moments") return cmd_moments(cfg);
      return cmd_polys(cfg);
    } catch (const InvalidArgument& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kConfigError;
    } catch (const TruncationTooSmall& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kConfigError;
    } catch (const GridError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kConfigError;
    } catch (const Error& e) {
      std::cerr << "numerical abort: " << e.what() << '\n';
      return kNumericalAbort;
    } catch (const Json::exception& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kConfigError;
    }
  }

 private:
  void common_options(CLI::App* sub) {
    sub->add_option("--config", flags_.config_path, "JSON config; flags override it");
    sub->add_option("--m", flags_.values.m, "truncation size (even, >= 4)");
    sub->add_option("--h", flags_.values.h, "RK4 step");
    sub->add_option("--t-end", flags_.values.t_end, "final time (multiple of h)");
    sub->add_option("--n-max", flags_.values.n_max, "highest order");
    sub->add_option("--out", flags_.values.out, "output file, - for stdout");
  }

  void instance_options(CLI::App* sub) {
    common_options(sub);
    sub->add_option("--seed", flags_.values.seed, "random bounded instance");
    sub->add_option("--from", flags_.values.from, "explicit state JSON");
    sub->add_option("--c-floor", flags_.values.c_floor, "abort when some |c_n| drops below");
  }

  bool given(const std::string& long_name) const {
    for (const auto* opt : options_)
      if (opt->get_name() == long_name && opt->count() > 0) return true;
    return false;
  }

  // Defaults, then the config file, then explicit flags.
  RunConfig resolve() const {
    RunConfig cfg;
    if (!flags_.config_path.empty()) {
      Json file;
      try {
        file = Json::parse(io::read_text(flags_.config_path));
      } catch (const Json::parse_error& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
      }
      const Json flat = flatten(file);
      take(flat, "seed", cfg.seed);
      take(flat, "from", cfg.from);
      take(flat, "m", cfg.m);
      take(flat, "h", cfg.h);
      take(flat, "t_end", cfg.t_end);
      take(flat, "n_max", cfg.n_max);
      take(flat, "c_floor", cfg.c_floor);
      take(flat, "control", cfg.control);
      take(flat, "magnitude", cfg.magnitude);
      take(flat, "seeds", cfg.seeds);
      take(flat, "quick", cfg.quick);
      take(flat, "jobs", cfg.jobs);
      take(flat, "out", cfg.out);
      take(flat, "state_out", cfg.state_out);
      take(flat, "angles", cfg.angles);
      take(flat, "radius_factor", cfg.radius_factor);
      take(flat, "t_samples", cfg.t_samples);
      take(flat, "tol", cfg.tol);
      take(flat, "corollary1", cfg.corollary1);
      take(flat, "timings", cfg.timings);
    }
    const RunConfig& f = flags_.values;
    if (given("--seed")) cfg.seed = f.seed;
    if (given("--from")) cfg.from = f.from;
    if (given("--m")) cfg.m = f.m;
    if (given("--h")) cfg.h = f.h;
    if (given("--t-end")) cfg.t_end = f.t_end;
    if (given("--n-max")) cfg.n_max = f.n_max;
    if (given("--c-floor")) cfg.c_floor = f.c_floor;
    if (given("--control")) cfg.control = f.control;
    if (given("--magnitude")) cfg.magnitude = f.magnitude;
    if (given("--seeds")) cfg.seeds = f.seeds;
    if (given("--quick")) cfg.quick = f.quick;
    if (given("--no-stress")) cfg.no_stress = f.no_stress;
    if (given("--no-convergence")) cfg.no_convergence = f.no_convergence;
    if (given("--jobs")) cfg.jobs = f.jobs;
    if (given("--out")) cfg.out = f.out;
    if (given("--state-out")) cfg.state_out = f.state_out;
    if (given("--angles")) cfg.angles = f.angles;
    if (given("--radius-factor")) cfg.radius_factor = f.radius_factor;
    if (given("--t-samples")) cfg.t_samples = f.t_samples;
    if (given("--tol")) cfg.tol = f.tol;
    if (given("--corollary1")) cfg.corollary1 = f.corollary1;
    if (given("--timings")) cfg.timings = f.timings;
    return cfg;
  }

  // Every invariant checked before any computation.
  static void validate_common(const RunConfig& cfg) {
    if (cfg.m < 4 || cfg.m % 2 != 0) throw InvalidArgument("m: must be even and >= 4");
    if (cfg.m < cfg.n_max + 2) throw InvalidArgument("n_max: need m >= n_max + 2");
    IntegratorConfig icfg;
    icfg.h = cfg.h;
    icfg.t_end = cfg.t_end;
    icfg.c_floor = cfg.c_floor;
    icfg.corruption = corruption(cfg);
    validate(icfg);
  }

  static CorruptionSpec corruption(const RunConfig& cfg) {
    const auto kind = parse_distortion(cfg.control);
    if (!kind) throw InvalidArgument("control: unknown distortion '" + cfg.control + "'");
    if (!(cfg.magnitude > 0.0)) throw InvalidArgument("magnitude: must be > 0");
    return CorruptionSpec{*kind, cfg.magnitude};
  }

  static IntegratorConfig integrator(const RunConfig& cfg) {
    IntegratorConfig icfg;
    icfg.h = cfg.h;
    icfg.t_end = cfg.t_end;
    icfg.c_floor = cfg.c_floor;
    icfg.corruption = corruption(cfg);
    return icfg;
  }

  // The initial state: explicit arrays or a bounded random draw.
  static LatticeState initial_state(const RunConfig& cfg) {
    if (!cfg.from.empty()) {
      LatticeState s = io::state_from_json(Json::parse(io::read_text(cfg.from)));
      if (!s.satisfies_c_floor(cfg.c_floor))
        throw InvalidArgument("c_floor: initial state has |c_n| = " +
                              io::format_double(s.min_abs_c()) + " below the floor");
      return s.with_time(0.0);
    }
    return make_bounded_instance(cfg.seed, cfg.m, cfg.h, cfg.t_end).trajectory.front().state;
  }

  static Trajectory simulate(const RunConfig& cfg, const LatticeState& s) {
    return integrate(AugmentedState::at_rest(s), integrator(cfg));
  }

  static void prepare(RunConfig& cfg, std::optional<LatticeState>& s, bool polys = false) {
    if (!cfg.from.empty()) {
      // dimension comes from the file
      LatticeState probe = io::state_from_json(Json::parse(io::read_text(cfg.from)));
      cfg.m = probe.dimension();
    } else if (cfg.c_floor > GeneratorConfig{}.c_min) {
      throw InvalidArgument("c_floor: above the generator's minimum |c| of " +
                            io::format_double(GeneratorConfig{}.c_min));
    }
    validate_common(cfg);
    if (polys && 2 * cfg.n_max + 1 >= cfg.m)
      throw InvalidArgument("n_max: B_n needs 2 n_max + 1 < m");
    s = initial_state(cfg);
  }

  int cmd_simulate(RunConfig cfg) {
    std::optional<LatticeState> s;
    prepare(cfg, s);
    const Trajectory traj = simulate(cfg, *s);
    if (!cfg.state_out.empty()) io::write_text(cfg.state_out, io::state_to_json(*s).dump(2) + "\n");
    io::write_text(cfg.out, io::trajectory_csv(traj));
    return kOk;
  }

  int cmd_verify(RunConfig cfg) {
    if (!cfg.from.empty()) throw InvalidArgument("from: verify runs on seeded instances only");
    validate_common(cfg);
    if (cfg.jobs == 0) throw InvalidArgument("jobs: must be >= 1");
    if (cfg.angles == 0) throw InvalidArgument("angles: must be >= 1");
    if (cfg.t_samples == 0) throw InvalidArgument("t_samples: must be >= 1");
    if (!(cfg.radius_factor >= kDefaultZMargin))
      throw InvalidArgument("radius_factor: must be >= 1.5");
    if (cfg.seeds == 0) throw InvalidArgument("seeds: must be >= 1");

    SuiteConfig suite;
    if (given("--seed") && !given("--seeds"))
      suite.seeds = {cfg.seed};
    else
      suite.seeds = default_seeds(cfg.quick ? std::min<std::size_t>(3, cfg.seeds) : cfg.seeds);
    suite.m = cfg.m;
    suite.h = cfg.h;
    suite.t_end = cfg.t_end;
    suite.sampling.n_max = cfg.n_max;
    suite.sampling.angles = cfg.angles;
    suite.sampling.radius_factor = cfg.radius_factor;
    suite.sampling.t_samples = cfg.t_samples;
    suite.jobs = cfg.jobs;
    suite.stress = !cfg.no_stress;
    suite.convergence = !cfg.no_convergence;
    const CorruptionSpec flow = corruption(cfg);
    if (flow.kind != Distortion::none) suite.control = flow;

    const SuiteResult result = run_suite(suite);
    for (const auto& c : result.checks)
      std::fprintf(stderr, "%-26s seed %-3llu residual %-12.3e threshold %-8.1e %s\n",
                   c.id.c_str(), static_cast<unsigned long long>(c.instance.seed),
                   c.max_residual, c.threshold,
                   c.pass ? "pass" : (c.expect_fail ? "fail (expected)" : "FAIL"));
    for (const auto& c : result.controls)
      std::fprintf(stderr, "control %-18s seed %-3llu max residual %-12.3e %s\n",
                   std::string(to_string(c.corruption.kind)).c_str(),
                   static_cast<unsigned long long>(c.seed), c.max_residual,
                   c.detected ? "detected" : "NOT DETECTED");
    for (const auto& c : result.convergence)
      std::fprintf(stderr, "%-26s seed %-3llu ratio %-8.3f %s\n", c.id.c_str(),
                   static_cast<unsigned long long>(c.seed), c.ratio, c.pass ? "pass" : "FAIL");
    io::write_text(cfg.out, io::report_to_json(result, cfg.timings).dump(2) + "\n");
    return result.ok() ? kOk : kCheckFailure;
  }

  int cmd_resolvent(RunConfig cfg) {
    if (cfg.angles == 0) throw InvalidArgument("angles: must be >= 1");
    if (cfg.t_samples == 0) throw InvalidArgument("t_samples: must be >= 1");
    if (!(cfg.radius_factor >= kDefaultZMargin))
      throw InvalidArgument("radius_factor: must be >= 1.5");
    if (!(cfg.tol > 0.0)) throw InvalidArgument("tol: must be > 0");
    std::optional<LatticeState> s;
    prepare(cfg, s);
    const Trajectory traj = simulate(cfg, *s);
    const auto zs = ring(cfg.radius_factor * traj.max_norm_bound().rho, cfg.angles);

    const std::size_t steps = traj.size() - 1;
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < cfg.t_samples; ++k)
      idx.push_back(cfg.t_samples == 1 ? 0 : (k * steps) / (cfg.t_samples - 1));

    std::vector<std::vector<ClosedFormSample>> closed(zs.size());
    if (cfg.corollary1)
      for (std::size_t q = 0; q < zs.size(); ++q) closed[q] = closed_form_resolvent(traj, zs[q], cfg.tol);

    std::vector<io::ResolventRow> rows;
    for (auto i : idx) {
      const BandedOperator J(traj[i].state);
      for (std::size_t q = 0; q < zs.size(); ++q) {
        io::ResolventRow row{traj.time(i), resolvent_block(J, zs[q], cfg.tol), std::nullopt};
        if (cfg.corollary1) row.closed_form = closed[q][i].value;
        rows.push_back(std::move(row));
      }
    }
    io::write_text(cfg.out, io::resolvent_csv(rows, cfg.corollary1));
    return kOk;
  }

  int cmd_moments(RunConfig cfg) {
    std::optional<LatticeState> s;
    prepare(cfg, s);
    const Trajectory traj = simulate(cfg, *s);
    const auto U = moments_from_J(BandedOperator(traj.back().state), cfg.n_max);
    Json out{{"t", traj.back().time()}, {"moments", io::moments_to_json(U)}};
    io::write_text(cfg.out, out.dump(2) + "\n");
    return kOk;
  }

  int cmd_polys(RunConfig cfg) {
    std::optional<LatticeState> s;
    prepare(cfg, s, true);
    const Trajectory traj = simulate(cfg, *s);
    const LatticeState& last = traj.back().state;
    Json out = io::polys_to_json(scalar_polys(last, cfg.n_max), vector_polys(last, cfg.n_max));
    out["t"] = last.time();
    io::write_text(cfg.out, out.dump(2) + "\n");
    return kOk;
  }

  CLI::App app_;
  Flags flags_;
  std::vector<const CLI::Option*> options_;
};

}  // namespace

int main(int argc, char** argv) {
  App app;
  return app.run(argc, argv);
}
