#include "riccati_geom/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>

#include "riccati_geom/cgcare.hpp"
#include "riccati_geom/errors.hpp"
#include "riccati_geom/geometry.hpp"
#include "riccati_geom/hamiltonian.hpp"
#include "riccati_geom/sim.hpp"
#include "riccati_geom/stabilize.hpp"

#ifndef RICCATI_GEOM_VERSION
#define RICCATI_GEOM_VERSION "unknown"
#endif

namespace riccati_geom {

namespace {

using J = ReportJson;

J num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return 0.0;  // no negative zero in reports
  return v;
}

J to_json(const Matrix& m) {
  J rows = J::array();
  for (Index i = 0; i < m.rows(); ++i) {
    J row = J::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

J to_json(const Vector& v) {
  J out = J::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
  return out;
}

J to_json(const Spectrum& s) {
  J out = J::array();
  for (const Complex& c : s.values()) out.push_back(J::array({num(c.real()), num(c.imag())}));
  return out;
}

J to_json(const Subspace& s) {
  J out = J::object();
  out["dim"] = s.dim();
  out["basis"] = to_json(s.basis());
  return out;
}

class Builder {
 public:
  Builder(const char* command, const ProblemFile& problem, double tol, std::uint64_t seed) {
    json_["command"] = command;
    json_["problem"] = problem.name;
    json_["candidate"] = nullptr;
    json_["checks"] = J::array();
    json_["objects"] = J::object();
    json_["provenance"] = {{"tol", tol}, {"seed", seed}, {"version", RICCATI_GEOM_VERSION}};
  }

  void candidate(const std::string& label) { json_["candidate"] = label; }

  void check(const std::string& name, bool pass, double defect, double threshold, const std::string& subject = "",
             bool informational = false) {
    J c = J::object();
    c["name"] = name;
    if (!subject.empty()) c["subject"] = subject;
    c["pass"] = pass;
    c["defect"] = num(defect);
    c["threshold"] = num(threshold);
    if (informational) c["informational"] = true;
    json_["checks"].push_back(std::move(c));
  }

  // pass iff defect <= threshold
  void bound(const std::string& name, double defect, double threshold, const std::string& subject = "") {
    check(name, defect <= threshold, defect, threshold, subject);
  }

  J& objects() { return json_["objects"]; }

  Report finish() {
    Report r{json_};
    r.json["status"] = r.passed() ? "pass" : "fail";
    return r;
  }

 private:
  J json_;
};

// A candidate from the file, or the reduction solver's answer when the file
// has none.
Candidate pick_candidate(const ProblemFile& problem, const CommandOptions& options, double tol) {
  if (problem.candidates.empty() && !options.candidate) {
    return {"reduced", solve_reduced(problem.sigma, std::nullopt, tol).solution.X};
  }
  return find_candidate(problem, options.candidate);
}

void require_verified(const PopovTriple& sigma, const Candidate& c, double tol) {
  const CandidateSolution v = verify_cgcare(sigma, c.X, tol);
  if (!v.verified()) {
    std::ostringstream os;
    os << "candidate \"" << c.label << "\" does not solve CGCARE (status " << to_string(v.status) << ", residual "
       << v.residual_norm << ", constraint defect " << v.constraint_defect << ", threshold " << v.threshold << ")";
    throw DomainError(os.str());
  }
}

Spectrum chosen_targets(const ProblemFile& problem, const CommandOptions& options, Index r) {
  if (options.targets) return *options.targets;
  if (problem.targets) return *problem.targets;
  std::vector<Complex> v;
  for (Index i = 1; i <= r; ++i) v.emplace_back(-static_cast<double>(i), 0.0);
  return Spectrum(v);
}

std::vector<Vector> initial_states(const ProblemFile& problem, const CommandOptions& options, std::uint64_t seed) {
  if (options.x0) {
    if (options.x0->size() != problem.sigma.n()) throw InputError("--x0 has the wrong length");
    return {*options.x0};
  }
  if (!problem.x0.empty()) return problem.x0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> out;
  for (int k = 0; k < 3; ++k) {
    Vector v(problem.sigma.n());
    for (Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    out.push_back(v);
  }
  return out;
}

}  // namespace

bool Report::passed() const {
  for (const auto& c : json["checks"]) {
    if (!c["pass"].get<bool>() && !(c.contains("informational") && c["informational"].get<bool>())) return false;
  }
  return true;
}

double resolve_tol(const ProblemFile& problem, const CommandOptions& options) {
  if (options.tol) return *options.tol;
  if (problem.tol) return *problem.tol;
  if (const char* env = std::getenv("RICCATI_GEOM_TOL"); env != nullptr && *env != '\0') {
    double t = 0.0;
    try {
      t = parse_scalar(env);
    } catch (const InputError&) {
      throw InputError(std::string("RICCATI_GEOM_TOL=\"") + env + "\" is not a number");
    }
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("RICCATI_GEOM_TOL must be a positive number");
    return t;
  }
  return kDefaultTol;
}

std::uint64_t resolve_seed(const ProblemFile& problem, const CommandOptions& options) {
  if (options.seed) return *options.seed;
  if (problem.seed) return *problem.seed;
  return kDefaultSeed;
}

Report cmd_check(const ProblemFile& problem, const CommandOptions& options) {
  const double tol = resolve_tol(problem, options);
  Builder b("check", problem, tol, resolve_seed(problem, options));
  const PopovCheck pc = check_popov(problem.sigma, tol);
  const double thr = pc.threshold;
  auto neg = [](double e) { return std::max(0.0, -e); };
  b.check("pi_psd", pc.psd, neg(pc.pi_min_eig), thr);
  b.check("R_psd", pc.R_psd, neg(pc.R_min_eig), thr);
  b.check("kerR_in_kerS", pc.kerR_in_kerS, pc.kerR_defect, thr);
  b.check("schur_complement_of_R_psd", pc.schur_primal_psd, neg(pc.schur_primal_min_eig), thr);
  b.check("Q_psd", pc.Q_psd, neg(pc.Q_min_eig), thr);
  b.check("kerQ_in_kerST", pc.kerQ_in_kerST, pc.kerQ_defect, thr);
  b.check("schur_complement_of_Q_psd", pc.schur_dual_psd, neg(pc.schur_dual_min_eig), thr);
  b.check("pseudo_inverse_identities", pc.identities, pc.identity_defect, thr);
  b.check("characterizations_agree", pc.primal() == pc.psd && pc.dual() == pc.psd, 0.0, 0.0);
  J& o = b.objects();
  o["n"] = problem.sigma.n();
  o["m"] = problem.sigma.m();
  o["min_eigenvalues"] = {{"Pi", num(pc.pi_min_eig)},
                          {"R", num(pc.R_min_eig)},
                          {"Q", num(pc.Q_min_eig)},
                          {"Q - S R^+ S^T", num(pc.schur_primal_min_eig)},
                          {"R - S^T Q^+ S", num(pc.schur_dual_min_eig)}};
  o["rank_R"] = numerical_rank(problem.sigma.R, tol);
  o["rank_Pi"] = numerical_rank(problem.sigma.pi(), tol);
  return b.finish();
}

Report cmd_verify(const ProblemFile& problem, const CommandOptions& options) {
  const double tol = resolve_tol(problem, options);
  const std::uint64_t seed = resolve_seed(problem, options);
  const PopovTriple& sigma = problem.sigma;
  Builder b("verify", problem, tol, seed);
  std::vector<Candidate> list;
  if (options.candidate) {
    list.push_back(find_candidate(problem, options.candidate));
    b.candidate(*options.candidate);
  } else {
    list = problem.candidates;
  }
  if (list.empty()) throw InputError("problem \"" + problem.name + "\" has no candidate solutions to verify");

  J per = J::object();
  struct Verified {
    std::string label;
    Subspace r0;
    Matrix A_X;
  };
  std::vector<Verified> good;
  const Index rank_r = numerical_rank(sigma.R, tol);
  for (const Candidate& c : list) {
    const CandidateSolution v = verify_cgcare(sigma, c.X, tol);
    J obj = J::object();
    obj["status"] = to_string(v.status);
    obj["residual_norm"] = num(v.residual_norm);
    obj["constraint_defect"] = num(v.constraint_defect);
    obj["scale"] = num(v.scale);
    b.bound("gcare_residual", v.residual_norm, v.threshold, c.label);
    b.bound("kernel_constraint", v.constraint_defect, v.threshold, c.label);
    b.bound("symmetric", v.asymmetry, tol * std::max(1.0, c.X.norm()), c.label);
    if (!v.verified()) {
      per[c.label] = std::move(obj);
      continue;
    }
    const DerivedMatrices d = derived_matrices(sigma, c.X, tol);
    const double thr = v.threshold;
    const Matrix r_pinv = pinv(sigma.R, tol);
    b.bound("riccati_identity", (d.Q_X - d.S_X * r_pinv * d.S_X.transpose()).norm(), thr, c.label);
    b.bound("closed_loop_lyapunov", (c.X * d.A_X + d.A_X.transpose() * c.X + d.Q0X).norm(), thr, c.label);
    b.bound("Q0X_equals_CX_gram", (d.Q0X - d.C_X.transpose() * d.C_X).norm(), thr, c.label);
    const Index nr = normal_rank_popov(sigma, c.X, tol, seed);
    b.check("popov_normal_rank_equals_rank_R", nr == rank_r, std::abs(static_cast<double>(nr - rank_r)), 0.0, c.label);

    const KernelOutputNullingReport kr = check_kernel_output_nulling(sigma, c.X, tol);
    b.check("ker_X_output_nulling", kr.is_output_nulling, 0.0, 0.0, c.label);
    b.check("minus_KX_friend_of_ker_X", kr.friend_is_minus_KX, std::max(kr.invariance_defect, kr.nulling_defect),
            kr.threshold, c.label);

    const Subspace r0 = r0x(sigma, c.X, tol);
    const Matrix& P = r0.basis();
    b.bound("R0_in_ker_CX", r0.dim() ? (d.C_X * P).norm() : 0.0, thr, c.label);
    b.bound("X_annihilates_R0", r0.dim() ? (c.X * P).norm() : 0.0, thr, c.label);
    const Quadruple q{sigma.A, sigma.B, d.factor.C, d.factor.D};
    const Subspace rstar = reachability_on(q, kr.ker_X, tol);
    const double g = subspace_gap(rstar, r0);
    b.check("reachability_on_ker_X_equals_R0", subspace_equal(rstar, r0, tol), g, tol, c.label);

    obj["A_X"] = to_json(d.A_X);
    obj["K_X"] = to_json(d.K_X);
    obj["closed_loop_spectrum"] = to_json(eig(d.A_X));
    obj["R0X"] = to_json(r0);
    obj["ker_X"] = to_json(kr.ker_X);
    obj["popov_normal_rank"] = nr;
    if (!kr.warnings.empty()) obj["warnings"] = kr.warnings;
    per[c.label] = std::move(obj);
    good.push_back({c.label, r0, d.A_X});
  }
  for (std::size_t i = 1; i < good.size(); ++i) {
    const Verified& a = good.front();
    const Verified& y = good[i];
    const std::string subject = a.label + "," + y.label;
    b.check("R0X_independent_of_X", subspace_equal(a.r0, y.r0, tol), subspace_gap(a.r0, y.r0), tol, subject);
    if (a.r0.dim() == y.r0.dim() && a.r0.dim() > 0) {
      const Matrix& P = a.r0.basis();
      b.bound("A_X_agrees_on_R0", (a.A_X * P - y.A_X * P).norm(), tol * (1.0 + a.A_X.norm() + y.A_X.norm()), subject);
    }
  }
  b.objects()["rank_R"] = rank_r;
  b.objects()["candidates"] = std::move(per);
  return b.finish();
}

Report cmd_zeros(const ProblemFile& problem, const CommandOptions& options) {
  const double tol = resolve_tol(problem, options);
  const std::uint64_t seed = resolve_seed(problem, options);
  const PopovTriple& sigma = problem.sigma;
  Builder b("zeros", problem, tol, seed);
  const Candidate c = pick_candidate(problem, options, tol);
  b.candidate(c.label);
  require_verified(sigma, c, tol);

  const PencilDecomposition pd = pencil_decompose(sigma, c.X, tol);
  const Spectrum zeros = invariant_zeros(sigma, c.X, tol, seed);
  const DerivedMatrices d = derived_matrices(sigma, c.X, tol);
  const auto pencil = [&](Complex s) { return hamiltonian_pencil(sigma, c.X, s, tol); };
  const Quadruple ham = build_hamiltonian(sigma, tol).quadruple();

  Index sampled = 0;
  double lemma_gap = 0.0;
  double block_residual = 0.0;
  for (const Complex& s : sample_points(d.A_X, 5, seed)) {
    const Index rp = numerical_rank(pencil(s), tol);
    const Index rh = rosenbrock_rank(ham, s, tol);
    sampled = std::max(sampled, rp);
    lemma_gap = std::max(lemma_gap, std::abs(static_cast<double>(rp - rh)));
    block_residual = std::max(
        block_residual, (pd.U_X.cast<Complex>() * pencil(s) * pd.V_X.cast<Complex>() - pd.block_form(s)).norm());
  }
  b.check("sampled_normal_rank", sampled == pd.normal_rank, std::abs(static_cast<double>(sampled - pd.normal_rank)), 0.0);
  b.check("hamiltonian_rosenbrock_rank_agrees", lemma_gap == 0.0, lemma_gap, 0.0);
  b.bound("block_form_residual", block_residual, tol * (1.0 + d.A_X.norm() + sigma.B.norm() + sigma.R.norm()));
  b.check("R0_dimension_matches", pd.r == r0x(sigma, c.X, tol).dim(), 0.0, 0.0);
  const Index reach = krylov_subspace(pd.A_X11, pd.B21, tol, 1.0).dim();
  b.check("reachable_A11_B21", reach == pd.r, static_cast<double>(pd.r - reach), 0.0);

  // Rank scan at the zeros and at the eigenvalues of A_X (and their mirrors).
  std::vector<Complex> points = zeros.values();
  const Spectrum ax = eig(d.A_X);
  for (const Complex& lam : ax.values()) {
    for (const Complex& p : {lam, -lam}) {
      bool seen = false;
      for (const Complex& q : points) seen |= std::abs(q - p) <= 1e-9 * (1.0 + std::abs(p));
      if (!seen) points.push_back(p);
    }
  }
  J table = J::array();
  bool scan_ok = true;
  for (const Complex& p : points) {
    bool is_zero = false;
    for (const Complex& z : zeros.values()) is_zero |= std::abs(z - p) <= 1e-9 * (1.0 + std::abs(p));
    const RankDrop drop = confirm_rank_drop(pencil, p, pd.normal_rank, tol);
    const bool consistent = is_zero ? drop.genuine : drop.at_center == pd.normal_rank;
    scan_ok &= consistent;
    table.push_back({{"s", J::array({num(p.real()), num(p.imag())})},
                     {"rank", drop.at_center},
                     {"rank_nearby", drop.min_perturbed},
                     {"is_zero", is_zero},
                     {"consistent", consistent}});
  }
  b.check("rank_scan_consistent", scan_ok, 0.0, 0.0);

  J& o = b.objects();
  o["r"] = pd.r;
  o["m1"] = pd.m1;
  o["m2"] = pd.m2;
  o["Gamma_X"] = to_json(pd.A_X22);
  o["finite_zeros"] = to_json(zeros);
  o["normal_rank"] = pd.normal_rank;
  o["infinite_eigenvalue"] = {{"value", "inf"}, {"multiplicity", pd.infinite_multiplicity}};
  o["A_X_spectrum"] = to_json(eig(d.A_X));
  o["rank_scan"] = std::move(table);
  o["blocks"] = {{"A_X11", to_json(pd.A_X11)}, {"A_X12", to_json(pd.A_X12)}, {"B11", to_json(pd.B11)},
                 {"B12", to_json(pd.B12)},     {"B21", to_json(pd.B21)},     {"R0", to_json(pd.R0)},
                 {"T", to_json(pd.T)},         {"H", to_json(pd.H)}};
  return b.finish();
}

Report cmd_stabilize(const ProblemFile& problem, const CommandOptions& options) {
  const double tol = resolve_tol(problem, options);
  const std::uint64_t seed = resolve_seed(problem, options);
  const PopovTriple& sigma = problem.sigma;
  Builder b("stabilize", problem, tol, seed);
  const Candidate c = pick_candidate(problem, options, tol);
  b.candidate(c.label);
  require_verified(sigma, c, tol);

  const Index r = r0x(sigma, c.X, tol).dim();
  const std::optional<Spectrum> targets =
      r == 0 ? std::optional<Spectrum>() : std::optional<Spectrum>(chosen_targets(problem, options, r));
  const StabilizationResult res = stabilizing_gain(sigma, c.X, targets, tol, seed);
  const StabilizationReport rep = verify_stabilization(sigma, c.X, res, tol, seed);
  for (const Check& ch : rep.checks) b.check(ch.name, ch.pass, ch.defect, ch.threshold, "", ch.informational);

  J& o = b.objects();
  o["nothing_to_stabilize"] = res.nothing_to_stabilize;
  o["r"] = r;
  o["R0X_basis"] = to_json(res.P);
  if (!res.nothing_to_stabilize) {
    o["Xi_hat"] = to_json(res.Xi_hat);
    o["Omega_hat"] = to_json(res.Omega_hat);
    o["H1"] = to_json(res.H1);
    o["H2"] = to_json(res.H2);
    o["K"] = to_json(res.K);
    o["Xi"] = to_json(res.Xi);
    o["Omega"] = to_json(res.Omega);
  }
  o["L"] = to_json(res.L);
  o["assigned"] = to_json(res.assigned);
  o["untouched"] = to_json(res.untouched);
  o["closed_loop_spectrum"] = to_json(res.closed_loop);
  o["hurwitz"] = res.hurwitz;
  if (!res.hurwitz) {
    o["note"] = "A_X + B L is not Hurwitz: the eigenvalues of A_X on the quotient modulo R0,X are not all stable";
  }
  return b.finish();
}

Report cmd_simulate(const ProblemFile& problem, const CommandOptions& options) {
  const double tol = resolve_tol(problem, options);
  const std::uint64_t seed = resolve_seed(problem, options);
  const PopovTriple& sigma = problem.sigma;
  Builder b("simulate", problem, tol, seed);
  const Candidate c = pick_candidate(problem, options, tol);
  b.candidate(c.label);
  require_verified(sigma, c, tol);
  if (options.steps < 2) throw InputError("--steps must be at least 2");
  if (!(options.horizon >= 0.0) || !std::isfinite(options.horizon)) throw InputError("--horizon must be finite and >= 0");

  const DerivedMatrices d = derived_matrices(sigma, c.X, tol);
  Matrix L = Matrix::Zero(sigma.m(), sigma.n());
  if (options.with_L) {
    const Index r = r0x(sigma, c.X, tol).dim();
    const std::optional<Spectrum> targets =
        r == 0 ? std::optional<Spectrum>() : std::optional<Spectrum>(chosen_targets(problem, options, r));
    L = stabilizing_gain(sigma, c.X, targets, tol, seed).L;
  }
  const Matrix K = d.K_X - L;
  const Matrix A_cl = sigma.A - sigma.B * K;

  J runs = J::array();
  for (const Vector& x0 : initial_states(problem, options, seed)) {
    const SimulationResult sim = simulate(A_cl, x0, options.horizon, options.steps);
    const CostResult cr = cost(sigma, K, x0, tol);
    const OptimalCostReport oc = optimal_cost_check(sigma, c.X, x0, tol);
    J run = J::object();
    run["x0"] = to_json(x0);
    J traj = J::array();
    for (std::size_t i = 0; i < sim.times.size(); ++i) {
      traj.push_back({{"t", num(sim.times[i])}, {"x", to_json(sim.states[i])}});
    }
    run["trajectory"] = std::move(traj);
    run["cost"] = {{"J", num(cr.J)},
                   {"finite", cr.finite},
                   {"method", to_string(cr.method)},
                   {"tail_bound", num(cr.tail_bound)}};
    run["optimal_cost_check"] = {{"J_minus_KX", num(oc.cost.J)},
                                 {"x0_X_x0", num(oc.predicted)},
                                 {"gap", num(oc.gap)},
                                 {"X_psd", oc.x_psd},
                                 {"value_certified", oc.value_certified}};
    if (!oc.note.empty()) run["optimal_cost_check"]["note"] = oc.note;
    std::ostringstream subject;
    subject << "x0#" << runs.size();
    b.check("cost_nonnegative", !(cr.J < 0.0), cr.J < 0.0 ? -cr.J : 0.0, 0.0, subject.str());
    if (options.with_L) {
      const bool same_finiteness = cr.finite == oc.cost.finite;
      const double diff = !same_finiteness ? std::numeric_limits<double>::infinity()
                          : cr.finite      ? std::abs(cr.J - oc.cost.J) / (1.0 + std::abs(oc.cost.J))
                                           : 0.0;
      b.bound("cost_unchanged_by_L", diff, 1e-6, subject.str());
    }
    b.check("value_certified", oc.value_certified, oc.gap, 1e-6, subject.str(), true);
    runs.push_back(std::move(run));
  }
  J& o = b.objects();
  o["with_L"] = options.with_L;
  o["K"] = to_json(K);
  o["L"] = to_json(L);
  o["closed_loop_spectrum"] = to_json(eig(A_cl));
  o["horizon"] = num(options.horizon);
  o["steps"] = options.steps;
  o["runs"] = std::move(runs);
  return b.finish();
}

Report cmd_solve(const ProblemFile& problem, const CommandOptions& options) {
  const double tol = resolve_tol(problem, options);
  const std::uint64_t seed = resolve_seed(problem, options);
  Builder b("solve", problem, tol, seed);
  b.candidate("reduced");
  const std::optional<Spectrum> targets = options.targets ? options.targets : std::optional<Spectrum>();
  const ReducedSolution rs = solve_reduced(problem.sigma, targets, tol);
  const CandidateSolution& v = rs.solution;
  b.bound("gcare_residual", v.residual_norm, v.threshold);
  b.bound("kernel_constraint", v.constraint_defect, v.threshold);
  const DerivedMatrices d = derived_matrices(problem.sigma, v.X, tol);
  J& o = b.objects();
  o["X"] = to_json(v.X);
  o["status"] = to_string(v.status);
  o["r"] = rs.r;
  o["reduced_hamiltonian_spectrum"] = to_json(rs.hamiltonian);
  o["selected"] = to_json(rs.selected);
  o["A_X"] = to_json(d.A_X);
  o["closed_loop_spectrum"] = to_json(eig(d.A_X));
  return b.finish();
}

std::string render_json(const Report& report) { return report.json.dump(2) + "\n"; }

std::string render_text(const Report& report) {
  const J& j = report.json;
  std::ostringstream os;
  os << j["command"].get<std::string>() << ": " << j["problem"].get<std::string>();
  if (!j["candidate"].is_null()) os << " (candidate " << j["candidate"].get<std::string>() << ")";
  os << "\n";
  for (const auto& c : j["checks"]) {
    const bool info = c.contains("informational");
    os << (c["pass"].get<bool>() ? "  PASS " : (info ? "  NOTE " : "  FAIL ")) << c["name"].get<std::string>();
    if (c.contains("subject")) os << " [" << c["subject"].get<std::string>() << "]";
    os << "  defect=" << c["defect"].dump() << "  threshold=" << c["threshold"].dump() << "\n";
  }
  for (const auto& [key, value] : j["objects"].items()) os << "  " << key << ": " << value.dump() << "\n";
  const J& p = j["provenance"];
  os << "  tol=" << p["tol"].dump() << " seed=" << p["seed"].dump() << " version=" << p["version"].get<std::string>()
     << "\n";
  os << "status: " << j["status"].get<std::string>() << "\n";
  return os.str();
}

}  // namespace riccati_geom
