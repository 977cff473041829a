#include "nomamec/interior_point.hpp"

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

namespace nomamec {

namespace {

using Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

constexpr double kRegularization = 7e-8;
constexpr int kRefinementSteps = 10;
constexpr int kFactorAttempts = 3;
constexpr double kNearOptimalFactor = 100.0;
constexpr double kStepFraction = 0.99;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Inequality slack layout: `linear` orthant entries followed by SOC blocks.
struct ConeLayout {
  int linear = 0;
  std::vector<int> offsets;
  std::vector<int> sizes;
  int total = 0;

  int degree() const { return linear + static_cast<int>(sizes.size()); }
};

struct StandardForm {
  VectorXd c;
  SparseMatrix A;
  VectorXd b;
  SparseMatrix G;
  VectorXd h;
  ConeLayout cones;
};

StandardForm to_standard_form(const ConicProblem& problem) {
  const int n = problem.variable_count();
  StandardForm sf;
  sf.c = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) sf.c[i] = -problem.objective()[i];

  std::vector<Triplet> a_entries;
  std::vector<double> b_values;
  std::vector<Triplet> g_entries;
  std::vector<double> h_values;

  for (const auto& row : problem.rows()) {
    if (row.sense == RowSense::kEqual) {
      const int r = static_cast<int>(b_values.size());
      for (const auto& t : row.terms) a_entries.emplace_back(r, t.variable, t.coefficient);
      b_values.push_back(row.rhs);
    } else {
      const int r = static_cast<int>(h_values.size());
      for (const auto& t : row.terms) g_entries.emplace_back(r, t.variable, t.coefficient);
      h_values.push_back(row.rhs);
    }
  }
  for (int i = 0; i < n; ++i) {
    const double lb = problem.lower_bound(i);
    if (std::isinf(lb)) continue;
    const int r = static_cast<int>(h_values.size());
    g_entries.emplace_back(r, i, -1.0);
    h_values.push_back(-lb);
  }
  sf.cones.linear = static_cast<int>(h_values.size());

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (const auto& cone : problem.cones()) {
    const int first = static_cast<int>(h_values.size());
    sf.cones.offsets.push_back(first);
    sf.cones.sizes.push_back(static_cast<int>(cone.members.size()));
    if (cone.kind == ConeKind::kSecondOrder) {
      for (std::size_t k = 0; k < cone.members.size(); ++k)
        g_entries.emplace_back(first + static_cast<int>(k), cone.members[k], -1.0);
    } else {
      const int x1 = cone.members[0];
      const int x2 = cone.members[1];
      g_entries.emplace_back(first, x1, -inv_sqrt2);
      g_entries.emplace_back(first, x2, -inv_sqrt2);
      g_entries.emplace_back(first + 1, x1, -inv_sqrt2);
      g_entries.emplace_back(first + 1, x2, inv_sqrt2);
      for (std::size_t k = 2; k < cone.members.size(); ++k)
        g_entries.emplace_back(first + static_cast<int>(k), cone.members[k], -1.0);
    }
    h_values.insert(h_values.end(), cone.members.size(), 0.0);
  }
  sf.cones.total = static_cast<int>(h_values.size());

  sf.A.resize(static_cast<int>(b_values.size()), n);
  sf.A.setFromTriplets(a_entries.begin(), a_entries.end());
  sf.b = Eigen::Map<const VectorXd>(b_values.data(), static_cast<int>(b_values.size()));
  sf.G.resize(sf.cones.total, n);
  sf.G.setFromTriplets(g_entries.begin(), g_entries.end());
  sf.h = Eigen::Map<const VectorXd>(h_values.data(), static_cast<int>(h_values.size()));
  return sf;
}

// Jordan algebra of the product cone -----------------------------------------

VectorXd identity(const ConeLayout& k) {
  VectorXd e = VectorXd::Zero(k.total);
  e.head(k.linear).setOnes();
  for (int off : k.offsets) e[off] = 1.0;
  return e;
}

VectorXd jordan_product(const ConeLayout& k, const VectorXd& u, const VectorXd& v) {
  VectorXd w(k.total);
  w.head(k.linear) = u.head(k.linear).cwiseProduct(v.head(k.linear));
  for (std::size_t c = 0; c < k.sizes.size(); ++c) {
    const int off = k.offsets[c];
    const int q = k.sizes[c];
    w[off] = u.segment(off, q).dot(v.segment(off, q));
    w.segment(off + 1, q - 1) = u[off] * v.segment(off + 1, q - 1) + v[off] * u.segment(off + 1, q - 1);
  }
  return w;
}

/// Solves lambda o u = v for u.
VectorXd jordan_divide(const ConeLayout& k, const VectorXd& lambda, const VectorXd& v) {
  VectorXd u(k.total);
  u.head(k.linear) = v.head(k.linear).cwiseQuotient(lambda.head(k.linear));
  for (std::size_t c = 0; c < k.sizes.size(); ++c) {
    const int off = k.offsets[c];
    const int q = k.sizes[c];
    const double l0 = lambda[off];
    const auto l1 = lambda.segment(off + 1, q - 1);
    const auto v1 = v.segment(off + 1, q - 1);
    const double l1_norm = l1.norm();
    const double det = (l0 - l1_norm) * (l0 + l1_norm);
    const double u0 = (l0 * v[off] - l1.dot(v1)) / det;
    u[off] = u0;
    u.segment(off + 1, q - 1) = (v1 - u0 * l1) / l0;
  }
  return u;
}

/// Largest t such that x + t dx stays in K (x interior); +inf if unbounded.
double max_step(const ConeLayout& k, const VectorXd& x, const VectorXd& dx) {
  double step = kInfinity;
  for (int i = 0; i < k.linear; ++i)
    if (dx[i] < 0.0) step = std::min(step, -x[i] / dx[i]);
  for (std::size_t c = 0; c < k.sizes.size(); ++c) {
    const int off = k.offsets[c];
    const int q = k.sizes[c];
    const auto x1 = x.segment(off + 1, q - 1);
    const auto d1 = dx.segment(off + 1, q - 1);
    const double a = dx[off] * dx[off] - d1.squaredNorm();
    const double b = x[off] * dx[off] - x1.dot(d1);
    const double x1_norm = x1.norm();
    const double cc = (x[off] - x1_norm) * (x[off] + x1_norm);
    const double disc = b * b - a * cc;
    if (disc < 0.0) continue;
    const double denom = -b + std::sqrt(disc);
    if (denom > 0.0) step = std::min(step, cc / denom);
  }
  return step;
}

/// inf { t : x + t e in K }.
double distance_to_cone(const ConeLayout& k, const VectorXd& x) {
  double t = -kInfinity;
  for (int i = 0; i < k.linear; ++i) t = std::max(t, -x[i]);
  for (std::size_t c = 0; c < k.sizes.size(); ++c) {
    const int off = k.offsets[c];
    t = std::max(t, x.segment(off + 1, k.sizes[c] - 1).norm() - x[off]);
  }
  return t;
}

void push_into_cone(const ConeLayout& k, VectorXd& x) {
  const double t = distance_to_cone(k, x);
  const double scale = std::max(1.0, x.norm());
  if (t >= -1e-8 * scale) x += (1.0 + t) * identity(k);
}

// Nesterov-Todd scaling -------------------------------------------------------

/// W = blockdiag(diag(d), eta_c (2 v_c v_c' - J)); symmetric, W z = W^{-1} s.
struct Scaling {
  VectorXd d;
  std::vector<double> eta;
  std::vector<VectorXd> w;

  bool compute(const ConeLayout& k, const VectorXd& s, const VectorXd& z) {
    d.resize(k.linear);
    for (int i = 0; i < k.linear; ++i) {
      if (!(s[i] > 0.0) || !(z[i] > 0.0)) return false;
      d[i] = std::sqrt(s[i] / z[i]);
    }
    eta.resize(k.sizes.size());
    w.resize(k.sizes.size());
    for (std::size_t c = 0; c < k.sizes.size(); ++c) {
      const int off = k.offsets[c];
      const int q = k.sizes[c];
      const VectorXd sc = s.segment(off, q);
      const VectorXd zc = z.segment(off, q);
      const double s_tail = sc.tail(q - 1).norm();
      const double z_tail = zc.tail(q - 1).norm();
      const double s_det = (sc[0] - s_tail) * (sc[0] + s_tail);
      const double z_det = (zc[0] - z_tail) * (zc[0] + z_tail);
      if (!(s_det > 0.0) || !(z_det > 0.0) || sc[0] <= 0.0 || zc[0] <= 0.0) return false;
      const double a = std::sqrt(s_det);
      const double bb = std::sqrt(z_det);
      const VectorXd sn = sc / a;
      VectorXd zn = zc / bb;
      const double gamma = std::sqrt(0.5 * (1.0 + sn.dot(zn)));
      zn.tail(q - 1) *= -1.0;
      // NT point wbar, then v = sqrt(wbar) in the Jordan algebra.
      VectorXd v = (sn + zn) / (2.0 * gamma);
      const double denom = std::sqrt(2.0 * (v[0] + 1.0));
      v[0] += 1.0;
      w[c] = v / denom;
      eta[c] = std::sqrt(a / bb);
    }
    return true;
  }

  VectorXd apply(const ConeLayout& k, const VectorXd& v) const {
    VectorXd out(k.total);
    out.head(k.linear) = d.cwiseProduct(v.head(k.linear));
    for (std::size_t c = 0; c < k.sizes.size(); ++c) {
      const int off = k.offsets[c];
      const int q = k.sizes[c];
      const auto vc = v.segment(off, q);
      VectorXd jv = vc;
      jv.tail(q - 1) *= -1.0;
      out.segment(off, q) = eta[c] * (2.0 * w[c].dot(vc) * w[c] - jv);
    }
    return out;
  }

  VectorXd apply_inverse(const ConeLayout& k, const VectorXd& v) const {
    VectorXd out(k.total);
    out.head(k.linear) = v.head(k.linear).cwiseQuotient(d);
    for (std::size_t c = 0; c < k.sizes.size(); ++c) {
      const int off = k.offsets[c];
      const int q = k.sizes[c];
      VectorXd jv = v.segment(off, q);
      jv.tail(q - 1) *= -1.0;
      VectorXd jw = w[c];
      jw.tail(q - 1) *= -1.0;
      out.segment(off, q) = (2.0 * jw.dot(v.segment(off, q)) * jw - jv) / eta[c];
    }
    return out;
  }

  void set_identity(const ConeLayout& k) {
    d = VectorXd::Ones(k.linear);
    eta.assign(k.sizes.size(), 1.0);
    w.resize(k.sizes.size());
    for (std::size_t c = 0; c < k.sizes.size(); ++c) {
      // W = 2 e e' - J = I for the cone identity e.
      w[c] = VectorXd::Zero(k.sizes[c]);
      w[c][0] = 1.0;
    }
  }
};

// KKT system ------------------------------------------------------------------

/// [0 A' G~'; A 0 0; G~ 0 -I] with G~ = W^{-1} G. Solutions come back as
/// (dx, dy, W dz).
///
/// The -I block is eliminated first, leaving [G~'G~ + dI, A'; A, -dI] with
/// static regularization d. The x block is ordered by AMD and the y block
/// goes last, so no pivot is as small as d unless a variable is absent from
/// every cone row. Iterative refinement runs against the full unregularized
/// system.
class KktSystem {
 public:
  explicit KktSystem(const StandardForm& sf) : sf_(sf) {
    n_ = static_cast<int>(sf.c.size());
    p_ = static_cast<int>(sf.b.size());
    m_ = sf.cones.total;
    const ConeLayout& k = sf.cones;

    // W^{-1} mixes rows within a cone, so G~ has, in each column, every row
    // of any cone that G touches there.
    std::vector<int> cone_of(m_, -1);
    for (std::size_t c = 0; c < k.sizes.size(); ++c)
      for (int r = 0; r < k.sizes[c]; ++r) cone_of[k.offsets[c] + r] = static_cast<int>(c);
    std::vector<Triplet> pattern;
    std::vector<char> rows(m_, 0);
    for (int col = 0; col < sf.G.outerSize(); ++col) {
      std::fill(rows.begin(), rows.end(), 0);
      for (SparseMatrix::InnerIterator it(sf.G, col); it; ++it) {
        const int c = cone_of[it.row()];
        if (c < 0) {
          rows[it.row()] = 1;
        } else {
          for (int r = 0; r < k.sizes[c]; ++r) rows[k.offsets[c] + r] = 1;
        }
      }
      for (int r = 0; r < m_; ++r)
        if (rows[r]) pattern.emplace_back(r, col, 1.0);
    }
    scaled_g_.resize(m_, n_);
    scaled_g_.setFromTriplets(pattern.begin(), pattern.end());
    scaled_g_.makeCompressed();

    // Fill-reducing order for x on the pattern of G~'G~ + A'A.
    const SparseMatrix normal = SparseMatrix(scaled_g_.transpose() * scaled_g_) +
                                SparseMatrix(sf.A.transpose() * sf.A) + identity_matrix(n_);
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> inverse;
    Eigen::AMDOrdering<int>()(normal.selfadjointView<Eigen::Lower>(), inverse);
    position_.resize(n_);
    for (int i = 0; i < n_; ++i) position_[inverse.indices()[i]] = i;

    for (int col = 0; col < normal.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(normal, col); it; ++it)
        if (it.row() >= col) structure_.push_back(lower(position_[it.row()], position_[col]));
    for (int col = 0; col < sf.A.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(sf.A, col); it; ++it)
        structure_.emplace_back(n_ + it.row(), position_[col], 0.0);
    for (int i = 0; i < p_; ++i) structure_.emplace_back(n_ + i, n_ + i, 0.0);
    assemble(0.0);
    ldlt_.analyzePattern(matrix_);
  }

  /// A pivot can still cancel to zero; the regularization is then raised
  /// and the factorization retried.
  bool factor(const Scaling& scaling) {
    const ConeLayout& k = sf_.cones;
    VectorXd column(m_);
    for (int col = 0; col < n_; ++col) {
      column = sf_.G.col(col);
      const VectorXd scaled = scaling.apply_inverse(k, column);
      for (SparseMatrix::InnerIterator it(scaled_g_, col); it; ++it) it.valueRef() = scaled[it.row()];
    }
    normal_ = scaled_g_.transpose() * scaled_g_;
    double delta = kRegularization;
    for (int attempt = 0; attempt < kFactorAttempts; ++attempt, delta *= 100.0) {
      assemble(delta);
      ldlt_.factorize(matrix_);
      if (ldlt_.info() == Eigen::Success) return true;
    }
    return false;
  }

  /// rhs and result are stacked as (x, y, z) with z meaning W dz.
  VectorXd solve(const VectorXd& rhs) const {
    VectorXd sol = reduced_solve(rhs);
    VectorXd residual = rhs - multiply(sol);
    double error = residual.lpNorm<Eigen::Infinity>();
    const double target = 1e-14 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
    for (int step = 0; step < kRefinementSteps && error > target; ++step) {
      const VectorXd candidate = sol + reduced_solve(residual);
      const VectorXd next_residual = rhs - multiply(candidate);
      const double next_error = next_residual.lpNorm<Eigen::Infinity>();
      if (!(next_error < error)) break;
      sol = candidate;
      residual = next_residual;
      error = next_error;
    }
    return sol;
  }

 private:
  static SparseMatrix identity_matrix(int size) {
    SparseMatrix id(size, size);
    id.setIdentity();
    return id;
  }

  static Triplet lower(int a, int b) { return a >= b ? Triplet(a, b, 0.0) : Triplet(b, a, 0.0); }

  /// Lower triangle of the reduced matrix, x in AMD order then y.
  void assemble(double delta) {
    std::vector<Triplet> t = structure_;
    for (int col = 0; col < normal_.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(normal_, col); it; ++it) {
        if (it.row() < col) continue;
        const Triplet at = lower(position_[it.row()], position_[col]);
        t.emplace_back(at.row(), at.col(), it.value());
      }
    for (int i = 0; i < n_; ++i) t.emplace_back(i, i, delta);
    for (int col = 0; col < sf_.A.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(sf_.A, col); it; ++it)
        t.emplace_back(n_ + it.row(), position_[col], it.value());
    for (int i = 0; i < p_; ++i) t.emplace_back(n_ + i, n_ + i, -delta);
    matrix_.resize(n_ + p_, n_ + p_);
    matrix_.setFromTriplets(t.begin(), t.end());
  }

  VectorXd reduced_solve(const VectorXd& rhs) const {
    const VectorXd r3 = rhs.tail(m_);
    const VectorXd top = rhs.head(n_) + scaled_g_.transpose() * r3;
    VectorXd b(n_ + p_);
    for (int i = 0; i < n_; ++i) b[position_[i]] = top[i];
    b.tail(p_) = rhs.segment(n_, p_);
    const VectorXd u = ldlt_.solve(b);
    VectorXd out(n_ + p_ + m_);
    for (int i = 0; i < n_; ++i) out[i] = u[position_[i]];
    out.segment(n_, p_) = u.tail(p_);
    out.tail(m_) = scaled_g_ * out.head(n_) - r3;
    return out;
  }

  VectorXd multiply(const VectorXd& v) const {
    const auto x = v.head(n_);
    const auto y = v.segment(n_, p_);
    const auto z = v.tail(m_);
    VectorXd out(n_ + p_ + m_);
    out.head(n_) = sf_.A.transpose() * y + scaled_g_.transpose() * z;
    out.segment(n_, p_) = sf_.A * x;
    out.tail(m_) = scaled_g_ * x - z;
    return out;
  }

  const StandardForm& sf_;
  int n_ = 0, p_ = 0, m_ = 0;
  SparseMatrix scaled_g_;
  SparseMatrix normal_;
  std::vector<int> position_;
  std::vector<Triplet> structure_;
  SparseMatrix matrix_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> ldlt_;
};

struct Direction {
  VectorXd x, y, z, s;
};

}  // namespace

ConicSolution InteriorPointBackend::solve(const ConicProblem& problem) {
  problem.validate();
  const StandardForm sf = to_standard_form(problem);
  const ConeLayout& cones = sf.cones;
  const int n = static_cast<int>(sf.c.size());
  const int p = static_cast<int>(sf.b.size());
  const int m = cones.total;

  ConicSolution result;
  if (m == 0 || n == 0) {
    result.status = SolveStatus::kNumericalFailure;
    return result;
  }

  KktSystem kkt(sf);
  Scaling scaling;
  scaling.set_identity(cones);
  if (!kkt.factor(scaling)) return result;

  auto stack = [&](const VectorXd& a, const VectorXd& b, const VectorXd& c) {
    VectorXd v(n + p + m);
    v << a, b, c;
    return v;
  };

  // Least-norm start, then shifted into the interior of K.
  VectorXd primal = kkt.solve(stack(VectorXd::Zero(n), sf.b, sf.h));
  VectorXd x = primal.head(n);
  VectorXd s = -primal.tail(m);
  VectorXd dual = kkt.solve(stack(-sf.c, VectorXd::Zero(p), VectorXd::Zero(m)));
  VectorXd y = dual.segment(n, p);
  VectorXd z = dual.tail(m);
  push_into_cone(cones, s);
  push_into_cone(cones, z);

  const double x_scale = std::max(1.0, sf.c.norm());
  const double y_scale = std::max(1.0, sf.b.norm());
  const double z_scale = std::max(1.0, sf.h.norm());
  const VectorXd e = identity(cones);
  const double degree = cones.degree();

  auto newton = [&](const VectorXd& rx, const VectorXd& ry, const VectorXd& rz, const VectorXd& lambda,
                    const VectorXd& ds) {
    const VectorXd u = jordan_divide(cones, lambda, ds);
    const VectorXd sol = kkt.solve(stack(-rx, -ry, -scaling.apply_inverse(cones, rz) - u));
    const VectorXd scaled_dz = sol.tail(m);
    Direction d{sol.head(n), sol.segment(n, p), scaling.apply_inverse(cones, scaled_dz), VectorXd()};
    d.s = scaling.apply(cones, u - scaled_dz);
    return d;
  };

  VectorXd fallback;
  double fallback_objective = 0.0;
  for (int it = 0; it <= settings_.max_iterations; ++it) {
    const VectorXd rx = sf.c + sf.A.transpose() * y + sf.G.transpose() * z;
    const VectorXd ry = sf.A * x - sf.b;
    const VectorXd rz = sf.G * x + s - sf.h;
    const double gap = s.dot(z);
    const double pcost = sf.c.dot(x);
    const double dcost = -sf.b.dot(y) - sf.h.dot(z);
    const double pres = std::max(ry.size() ? ry.norm() / y_scale : 0.0, rz.norm() / z_scale);
    const double dres = rx.norm() / x_scale;
    double relgap = kInfinity;
    if (pcost < 0.0)
      relgap = gap / -pcost;
    else if (dcost > 0.0)
      relgap = gap / dcost;

    result.iterations = it;
    result.primal_residual = pres;
    result.dual_residual = dres;
    result.duality_gap = gap;

    if (settings_.verbose)
      std::fprintf(stderr, "%3d pcost %+.9e dcost %+.9e gap %.2e pres %.2e dres %.2e\n", it, -pcost,
                   -dcost, gap, pres, dres);
    const bool feasible =
        pres <= settings_.feasibility_tolerance && dres <= settings_.feasibility_tolerance;
    auto record = [&](SolveStatus status, const VectorXd& primal, double objective) {
      result.status = status;
      result.primal.assign(primal.data(), primal.data() + n);
      result.objective = objective;
      return result;
    };
    if (feasible &&
        (gap <= settings_.absolute_gap_tolerance || relgap <= settings_.relative_gap_tolerance))
      return record(SolveStatus::kOptimal, x, -pcost);
    // Close to the end the KKT solves lose accuracy and the residuals can
    // drift upward; the last nearly optimal iterate is kept as a fallback.
    if (feasible && (gap <= kNearOptimalFactor * settings_.absolute_gap_tolerance ||
                     relgap <= kNearOptimalFactor * settings_.relative_gap_tolerance)) {
      fallback = x;
      fallback_objective = -pcost;
    } else if (!feasible && fallback.size() > 0) {
      return record(SolveStatus::kOptimal, fallback, fallback_objective);
    }
    auto give_up = [&](SolveStatus status) {
      if (fallback.size() > 0) return record(SolveStatus::kOptimal, fallback, fallback_objective);
      result.status = status;
      return result;
    };
    if (it == settings_.max_iterations) return give_up(SolveStatus::kIterationLimit);

    if (!scaling.compute(cones, s, z) || !kkt.factor(scaling))
      return give_up(SolveStatus::kNumericalFailure);
    const VectorXd lambda = scaling.apply(cones, z);
    const VectorXd lambda_sq = jordan_product(cones, lambda, lambda);

    const Direction aff = newton(rx, ry, rz, lambda, -lambda_sq);
    const double aff_step =
        std::min({1.0, max_step(cones, s, aff.s), max_step(cones, z, aff.z)});
    const double sigma = std::pow(std::max(0.0, 1.0 - aff_step), 3);
    const double mu = gap / degree;

    const VectorXd correction =
        jordan_product(cones, scaling.apply_inverse(cones, aff.s), scaling.apply(cones, aff.z));
    const Direction dir = newton(rx, ry, rz, lambda, -lambda_sq - correction + sigma * mu * e);
    const double step = std::min(
        1.0, kStepFraction * std::min(max_step(cones, s, dir.s), max_step(cones, z, dir.z)));
    if (!(step > 1e-12) || !dir.x.allFinite()) return give_up(SolveStatus::kNumericalFailure);
    x += step * dir.x;
    y += step * dir.y;
    z += step * dir.z;
    s += step * dir.s;
  }
  return result;
}

}  // namespace nomamec
