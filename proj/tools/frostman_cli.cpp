// Command-line front end: grows trees, runs the measure/kernel/restriction
// experiments, and writes plot-ready CSV/JSON artifacts.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "frostman/io_util.hpp"
#include "frostman/kernel_lab.hpp"
#include "frostman/measure_analysis.hpp"
#include "frostman/parallel.hpp"
#include "frostman/random_cantor.hpp"
#include "frostman/schur_young.hpp"
#include "frostman/sphere.hpp"

namespace fs = std::filesystem;
using namespace frostman;
using ordered_json = nlohmann::ordered_json;

namespace {

struct ScheduleArgs {
  std::string preset = "dim-epsilon";
  uint64_t N = 4;
  double shape = 0.5;
  int d = 1;
  int K = 6;

  ScaleSchedule build() const { return build_schedule(parse_preset(preset), N, shape, d, K); }
  void add_options(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "dim1 or dim-epsilon");
    cmd->add_option("--N", N, "base of N_k = N^k");
    cmd->add_option("--eps", shape, "epsilon (dim-epsilon) or gamma (dim1)");
    cmd->add_option("--gamma", shape, "alias for --eps");
    cmd->add_option("--d", d, "ambient dimension");
    cmd->add_option("--K", K, "number of stages");
  }
  void describe(std::ostringstream& os) const {
    os << "preset=" << preset << "\nN=" << N << "\nshape=" << g17(shape) << "\nd=" << d
       << "\nK=" << K << "\n";
  }
};

std::vector<uint64_t> parse_seeds(const std::string& spec) {
  std::vector<uint64_t> out;
  auto range = spec.find("..");
  if (range != std::string::npos) {
    uint64_t a = std::stoull(spec.substr(0, range));
    uint64_t b = std::stoull(spec.substr(range + 2));
    if (b < a) throw ConfigError("bad seed range: " + spec);
    for (uint64_t s = a; s <= b; ++s) out.push_back(s);
  } else {
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(std::stoull(tok));
  }
  if (out.empty()) throw ConfigError("empty seed list");
  return out;
}

// "start:stop:points_per_octave", log2-spaced inclusive of start.
std::vector<double> parse_log_grid(const std::string& spec) {
  double a, b;
  int ppo;
  char c1, c2;
  std::istringstream ss(spec);
  if (!(ss >> a >> c1 >> b >> c2 >> ppo) || c1 != ':' || c2 != ':' || a <= 0 || b < a || ppo < 1)
    throw ConfigError("bad grid spec '" + spec + "' (want start:stop:points_per_octave)");
  std::vector<double> out;
  double la = std::log2(a), lb = std::log2(b);
  for (int i = 0;; ++i) {
    double l = la + double(i) / double(ppo);
    if (l > lb + 1e-12) break;
    out.push_back(l);
  }
  return out;
}

struct Manifest {
  std::string command;
  std::ostringstream config;
  std::vector<uint64_t> seeds;
  std::map<std::string, bool> gates;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  bool all_pass() const {
    for (auto& [k, v] : gates)
      if (!v) return false;
    return true;
  }
  void write(const std::string& outdir) const {
    ordered_json j;
    j["command"] = command;
    j["config_hash"] = fnv1a(command + "\n" + config.str());
    j["seeds"] = seeds;
    ordered_json g;
    for (auto& [k, v] : gates) g[k] = v;
    j["gates"] = g;
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    j["wall_time_s"] = wall;
    j["timestamp"] = (long long)std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    write_text_file(outdir + "/manifest.json", j.dump(2) + "\n");
  }
};

void ensure_outdir(const std::string& outdir) {
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw ConfigError("cannot create output directory " + outdir);
}

int cmd_generate(const ScheduleArgs& sa, const std::string& seeds_spec, bool pin,
                 const std::string& outdir) {
  ScaleSchedule sched = sa.build();
  auto seeds = parse_seeds(seeds_spec);
  ensure_outdir(outdir);
  Manifest man;
  man.command = "generate";
  sa.describe(man.config);
  man.config << "pin=" << pin << "\nseeds=" << seeds_spec << "\n";
  man.seeds = seeds;
  std::ostringstream csv;
  csv << "seed,k,P_k,Pbar_k,log2_R_k,ratio,t_k_flag\n";
  for (uint64_t seed : seeds) {
    CantorTree t = grow_conditioned({sched, seed, pin, 1000});
    write_text_file(outdir + "/tree_" + std::to_string(seed) + ".json", serialize_tree(t));
    for (const CountRow& row : count_statistics(t).rows)
      csv << seed << "," << row.k << "," << row.P << "," << g17(row.Pbar) << ","
          << g17(row.log2_R) << "," << g17(row.ratio) << "," << (row.t_flag ? 1 : 0) << "\n";
  }
  write_text_file(outdir + "/counts.csv", csv.str());
  man.write(outdir);
  return 0;
}

int cmd_dimension(const ScheduleArgs& sa, const std::string& seeds_spec,
                  const std::string& outdir) {
  ScaleSchedule sched = sa.build();
  auto seeds = parse_seeds(seeds_spec);
  ensure_outdir(outdir);
  Manifest man;
  man.command = "dimension";
  sa.describe(man.config);
  man.config << "seeds=" << seeds_spec << "\n";
  man.seeds = seeds;
  // Enumerating cubes is hopeless once R_K blows past memory; the estimator
  // only needs stage counts, whose law the binomial chain reproduces exactly.
  bool count_only = sched.log2_R(sched.K) > 33.0;
  double mean = 0;
  for (uint64_t seed : seeds) {
    DimensionEstimate est;
    if (count_only)
      est = dimension_estimate(sched, simulate_count_chain_conditioned(sched, seed).P);
    else
      est = dimension_estimate(grow_conditioned({sched, seed, false, 1000}));
    mean += est.estimate / double(seeds.size());
    std::ostringstream csv;
    csv << "k,upper_seq,lower_seq\n";
    for (size_t i = 0; i < est.upper_seq.size(); ++i)
      csv << (i + 1) << "," << g17(est.upper_seq[i]) << ","
          << (i >= 1 ? g17(est.lower_seq[i - 1]) : "") << "\n";
    write_text_file(outdir + "/dimension_" + std::to_string(seed) + ".csv", csv.str());
  }
  std::ostringstream sum;
  sum << "mean_estimate,reference,count_only\n"
      << g17(mean) << ","
      << g17(sched.preset == Preset::dim_epsilon ? sched.d * (1 - sched.shape) : double(sched.d))
      << "," << (count_only ? 1 : 0) << "\n";
  write_text_file(outdir + "/dimension_summary.csv", sum.str());
  man.write(outdir);
  return 0;
}

int cmd_ballcheck(const ScheduleArgs& sa, const std::string& seeds_spec,
                  const std::string& radii_spec, double alpha, double upper_factor,
                  double lower_factor, const std::string& outdir) {
  ScaleSchedule sched = sa.build();
  auto seeds = parse_seeds(seeds_spec);
  ensure_outdir(outdir);
  Manifest man;
  man.command = "ballcheck";
  sa.describe(man.config);
  man.config << "seeds=" << seeds_spec << "\nradii=" << radii_spec << "\nalpha=" << g17(alpha)
             << "\n";
  man.seeds = seeds;
  std::vector<double> log2_radii;
  for (double l : parse_log_grid(radii_spec)) log2_radii.push_back(l);
  // the grid spec is in radius units already (values < 1 give negative log2)
  std::ostringstream up_csv, lo_csv;
  up_csv << "seed,center_id,log2_r,mass,ratio\n";
  lo_csv << "seed,center_id,log2_r,mass,ratio\n";
  bool up_ok = true, lo_ok = true;
  for (uint64_t seed : seeds) {
    CantorTree t = grow_conditioned({sched, seed, true, 1000});
    BallProfile up = upper_ball_profile(t, sched.K, log2_radii, alpha, -1.0, 32, seed);
    for (const auto& s : up.samples)
      up_csv << seed << "," << s.center_id << "," << g17(s.log2_r) << "," << g17(s.mass) << ","
             << g17(s.ratio) << "\n";
    if (up.sup_ratio > upper_factor * up.inf_ratio) up_ok = false;
    std::vector<double> v0(size_t(sched.d), 0.0);
    BallProfile lo = lower_ball_profile(t, sched.K, v0, log2_radii, alpha, -1.0);
    for (const auto& s : lo.samples)
      lo_csv << seed << "," << s.center_id << "," << g17(s.log2_r) << "," << g17(s.mass) << ","
             << g17(s.ratio) << "\n";
    if (!(lo.inf_ratio > 0) || lo.sup_ratio > lower_factor * lo.inf_ratio) lo_ok = false;
  }
  write_text_file(outdir + "/upper_profile.csv", up_csv.str());
  write_text_file(outdir + "/lower_profile.csv", lo_csv.str());
  man.gates["upper_factor"] = up_ok;
  man.gates["lower_factor"] = lo_ok;
  man.write(outdir);
  return man.all_pass() ? 0 : 1;
}

int cmd_kernel(const ScheduleArgs& sa, uint64_t seed, int stage, int n, double alpha,
               const std::string& p_list, const std::string& lambda_spec, double tol,
               const std::string& outdir) {
  ScaleSchedule sched = sa.build();
  ensure_outdir(outdir);
  Manifest man;
  man.command = "kernel";
  sa.describe(man.config);
  man.config << "seed=" << seed << "\nstage=" << stage << "\nn=" << n << "\nalpha=" << g17(alpha)
             << "\np=" << p_list << "\nlambda=" << lambda_spec << "\n";
  man.seeds = {seed};
  CantorTree t = grow_conditioned({sched, seed, false, 1000});
  StageMeasure m = stage_measure(t, stage == 0 ? sched.K : stage);
  std::vector<double> lgrid = parse_log_grid(lambda_spec);
  std::ostringstream csv;
  csv << "p,n,alpha,log2_lambda,log2_sup,slope,target,residual\n";
  bool ok = true;
  std::stringstream ps(p_list);
  std::string tok;
  while (std::getline(ps, tok, ',')) {
    double p = std::stod(tok);
    DecayFit f = fit_decay_exponent(m, n, p, alpha, lgrid, 10, seed);
    for (size_t i = 0; i < f.log2_lambda.size(); ++i)
      csv << g17(p) << "," << n << "," << g17(alpha) << "," << g17(f.log2_lambda[i]) << ","
          << g17(f.log2_sup[i]) << "," << g17(f.fit.slope) << "," << g17(f.target) << ","
          << g17(f.fit.max_residual) << "\n";
    if (std::abs(f.fit.slope - f.target) > tol) ok = false;
  }
  write_text_file(outdir + "/kernel_fit.csv", csv.str());
  man.gates["slope_within_tol"] = ok;
  man.write(outdir);
  return man.all_pass() ? 0 : 1;
}

int cmd_schur(uint64_t seed, uint64_t instances, uint64_t trials, uint64_t max_size,
              const std::string& outdir) {
  ensure_outdir(outdir);
  Manifest man;
  man.command = "schur";
  man.config << "seed=" << seed << "\ninstances=" << instances << "\ntrials=" << trials
             << "\nmax_size=" << max_size << "\n";
  man.seeds = {seed};
  double worst = 0;
  uint64_t worst_inst = 0;
  bool ok = true;
  for (uint64_t i = 0; i < instances; ++i) {
    SchurInstance inst = random_instance(seed + i, max_size, Rat(1), Rat(2), Rat(2));
    YoungReport rep = verify_young_inequality(inst, trials, seed ^ i);
    if (rep.max_ratio > worst) {
      worst = rep.max_ratio;
      worst_inst = i;
    }
    if (!rep.pass) ok = false;
  }
  ordered_json j;
  j["instance_hash"] = fnv1a("schur:" + std::to_string(seed) + ":" + std::to_string(instances));
  j["s"] = "1";
  j["q"] = "2";
  j["r"] = "2";
  SchurInstance worst_i = random_instance(seed + worst_inst, max_size, Rat(1), Rat(2), Rat(2));
  auto [A, B] = schur_bounds(worst_i);
  j["A_s"] = A;
  j["B_s"] = B;
  j["max_ratio"] = worst;
  j["trials"] = trials;
  j["verdict"] = ok ? "PASS" : "FAIL";
  write_text_file(outdir + "/schur_report.json", j.dump(2) + "\n");
  man.gates["young_inequality"] = ok;
  man.write(outdir);
  return man.all_pass() ? 0 : 1;
}

int cmd_sphere(const ScheduleArgs& sa, uint64_t seed, int stage, const std::string& kind_s,
               const std::string& arc_s, double L, double p, const std::string& l_spec, double tol,
               const std::string& outdir) {
  ensure_outdir(outdir);
  Manifest man;
  man.command = "sphere";
  sa.describe(man.config);
  man.config << "seed=" << seed << "\nstage=" << stage << "\nkind=" << kind_s << "\narc=" << arc_s
             << "\nL=" << g17(L) << "\np=" << g17(p) << "\nl=" << l_spec << "\n";
  man.seeds = {seed};
  HarmonicKind kind = kind_s == "zonal" ? HarmonicKind::zonal : HarmonicKind::highest_weight;
  ArcMeasure arc;
  double alpha = 1.0;
  if (arc_s == "cantor") {
    ScaleSchedule sched = sa.build();
    CantorTree t = grow_conditioned({sched, seed, true, 1000});
    arc = make_arc(stage_measure(t, stage == 0 ? sched.K : stage), L,
                   kind == HarmonicKind::zonal ? ArcKind::meridian : ArcKind::equatorial);
    alpha = sched.preset == Preset::dim_epsilon ? sched.d * (1 - sched.shape) : double(sched.d);
  } else {
    arc = lebesgue_arc(1 << 15, L,
                       kind == HarmonicKind::zonal ? ArcKind::meridian : ArcKind::equatorial);
  }
  std::vector<int> ls;
  for (double l2 : parse_log_grid(l_spec)) ls.push_back(int(std::llround(std::exp2(l2))));
  RestrictionFit f = fit_restriction_exponent(kind, arc, p, ls);
  double target;
  if (kind == HarmonicKind::highest_weight)
    target = 0.25;  // equatorial beam height ~ l^(1/4)
  else {
    Rat eps_rat(std::llround((1.0 - alpha) * 1048576), 1048576);
    Rat p_rat = p >= 1e17 ? Rat::inf() : Rat(std::llround(p * 10080), 10080);
    target = exponent_table(2, 1, eps_rat, p_rat).kappa.value();
  }
  std::ostringstream csv;
  csv << "p,n,alpha,log2_l,log2_norm,slope,target,residual\n";
  for (size_t i = 0; i < f.log2_l.size(); ++i)
    csv << g17(p) << ",2," << g17(alpha) << "," << g17(f.log2_l[i]) << "," << g17(f.log2_norm[i])
        << "," << g17(f.fit.slope) << "," << g17(target) << "," << g17(f.fit.max_residual) << "\n";
  write_text_file(outdir + "/sphere_fit.csv", csv.str());
  man.gates["slope_within_tol"] = std::abs(f.fit.slope - target) <= tol;
  man.write(outdir);
  return man.all_pass() ? 0 : 1;
}

int cmd_exponents(int n, const std::string& d_list, const std::string& eps_list,
                  const std::string& p_list, const std::string& outdir) {
  ensure_outdir(outdir);
  Manifest man;
  man.command = "exponents";
  man.config << "n=" << n << "\nd=" << d_list << "\neps=" << eps_list << "\np=" << p_list << "\n";
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(tok);
    return out;
  };
  std::ostringstream csv;
  csv << "n,d,epsilon,p,sogge,bgt,theta,vartheta,kappa,p0,p_star,branch_labels\n";
  for (const std::string& ds : split(d_list))
    for (const std::string& es : split(eps_list))
      for (const std::string& psv : split(p_list)) {
        ExponentRow row = exponent_table(n, std::stoi(ds), parse_rat(es), parse_rat(psv));
        csv << n << "," << ds << "," << row.epsilon.str() << "," << row.p.str() << ","
            << row.sogge.str() << "," << row.bgt.str() << "," << row.theta.str() << ","
            << row.vartheta.str() << "," << row.kappa.str() << "," << row.p0.str() << ","
            << row.p_star.str() << "," << row.branches << "\n";
      }
  write_text_file(outdir + "/exponents.csv", csv.str());
  man.write(outdir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();
  CLI::App app{"Random Cantor measures, Frostman profiles, and restriction-exponent experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file");

  std::string outdir = ".";
  app.add_option("--out", outdir, "output directory")->capture_default_str();

  ScheduleArgs sa;
  std::string seeds = "0..9";
  bool pin = false;
  std::string radii = "0.0000152587890625:0.015625:8";  // 2^-16 .. 2^-6
  double alpha = 0.5, upper_factor = 4.0, lower_factor = 8.0, tol = 0.1;
  uint64_t seed = 0, instances = 100, trials = 100, max_size = 64;
  int stage = 0, n_dim = 2;
  std::string p_list = "0.5,1,2,4,8", lambda = "16:4096:1", kind = "zonal", arc = "cantor";
  std::string l_spec = "16:512:1", d_list = "1", eps_list = "0.5", sphere_p = "8";
  double L = 1.0, sphere_p_val = 8.0;

  auto* gen = app.add_subcommand("generate", "grow conditioned trees, write tree JSON + counts");
  sa.add_options(gen);
  gen->add_option("--seeds", seeds, "seed list or a..b range");
  gen->add_flag("--pin-origin", pin, "force the origin branch to survive");

  auto* dim = app.add_subcommand("dimension", "box-dimension estimates per seed");
  sa.add_options(dim);
  dim->add_option("--seeds", seeds, "seed list or a..b range");

  auto* ball = app.add_subcommand("ballcheck", "upper/lower Frostman ball profiles");
  sa.add_options(ball);
  ball->add_option("--seeds", seeds, "seed list or a..b range");
  ball->add_option("--radii", radii, "radius grid start:stop:ppo");
  ball->add_option("--alpha", alpha, "target exponent");
  ball->add_option("--upper-factor", upper_factor, "upper-profile spread gate");
  ball->add_option("--lower-factor", lower_factor, "lower-profile spread gate");

  auto* ker = app.add_subcommand("kernel", "kernel-sum decay exponent fits");
  sa.add_options(ker);
  ker->add_option("--seed", seed);
  ker->add_option("--stage", stage, "measure stage (0 = K)");
  ker->add_option("--n", n_dim, "ambient manifold dimension");
  ker->add_option("--alpha", alpha, "ball exponent");
  ker->add_option("--p", p_list, "comma list of exponents");
  ker->add_option("--lambda", lambda, "grid start:stop:ppo");
  ker->add_option("--tol", tol, "slope tolerance");

  auto* sch = app.add_subcommand("schur", "random-instance Young inequality stress");
  sch->add_option("--seed", seed);
  sch->add_option("--instances", instances);
  sch->add_option("--trials", trials);
  sch->add_option("--max-size", max_size);

  auto* sph = app.add_subcommand("sphere", "restriction-norm growth fits on arcs");
  sa.add_options(sph);
  sph->add_option("--seed", seed);
  sph->add_option("--stage", stage, "measure stage (0 = K)");
  sph->add_option("--kind", kind, "zonal or highest");
  sph->add_option("--arc", arc, "cantor or lebesgue");
  sph->add_option("--L", L, "arc length (radians)");
  sph->add_option("--p", sphere_p_val, "Lebesgue exponent");
  sph->add_option("--l", l_spec, "degree grid start:stop:ppo");
  sph->add_option("--tol", tol, "slope tolerance");

  auto* expc = app.add_subcommand("exponents", "exact-rational exponent table");
  expc->add_option("--n", n_dim);
  expc->add_option("--d", d_list, "comma list");
  expc->add_option("--eps", eps_list, "comma list of rationals");
  expc->add_option("--p", sphere_p, "comma list of rationals (inf allowed)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(sa, seeds, pin, outdir);
    if (dim->parsed()) return cmd_dimension(sa, seeds, outdir);
    if (ball->parsed())
      return cmd_ballcheck(sa, seeds, radii, alpha, upper_factor, lower_factor, outdir);
    if (ker->parsed())
      return cmd_kernel(sa, seed, stage, n_dim, alpha, p_list, lambda, tol, outdir);
    if (sch->parsed()) return cmd_schur(seed, instances, trials, max_size, outdir);
    if (sph->parsed())
      return cmd_sphere(sa, seed, stage, kind, arc, L, sphere_p_val, l_spec, tol, outdir);
    if (expc->parsed()) return cmd_exponents(n_dim, d_list, eps_list, sphere_p, outdir);
  } catch (const ResolutionError& e) {
    std::fprintf(stderr, "resolution gate: %s\n", e.what());
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
