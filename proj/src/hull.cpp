#include "monobundle/hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace monobundle {

namespace {

constexpr double kWeightClamp = 1e-12;

struct AffineSolve {
  bool ok = false;
  Eigen::VectorXd mu;
};

// argmin |Q mu|^2 subject to sum(mu) = 1. Writing mu = (1 - sum t, t) turns
// this into the least-squares problem min |q_0 + D t|, D = [q_i - q_0].
AffineSolve affine_minimizer(const Matrix& q) {
  const Eigen::Index k = q.cols();
  if (k == 1) return {true, Eigen::VectorXd::Ones(1)};
  const Matrix d = q.rightCols(k - 1).colwise() - q.col(0);
  Eigen::ColPivHouseholderQR<Matrix> qr(d);
  qr.setThreshold(1e-10);
  if (qr.rank() < k - 1) return {};
  const Eigen::VectorXd t = qr.solve(-q.col(0));
  if (!t.allFinite()) return {};
  Eigen::VectorXd mu(k);
  mu[0] = 1.0 - t.sum();
  mu.tail(k - 1) = t;
  return {true, mu};
}

Matrix gather(std::span<const Vector> pool, std::span<const std::size_t> indices) {
  require(!indices.empty(), "min_norm_point: empty vector set");
  const Eigen::Index dim = pool[indices[0]].size();
  Matrix p(dim, static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) {
    require(indices[c] < pool.size(), "min_norm_point: index out of range");
    const Vector& v = pool[indices[c]];
    require(v.size() == dim, "min_norm_point: vectors differ in dimension");
    require_finite(v, "min_norm_point input");
    p.col(static_cast<Eigen::Index>(c)) = v;
  }
  return p;
}

// Accelerated projected gradient on f(a) = |P a|^2 over the simplex.
Eigen::VectorXd projected_gradient(const Matrix& p, Eigen::VectorXd start, int iterations) {
  const Matrix g = p.transpose() * p;
  // Power iteration for the Lipschitz constant of grad f = 2 G a.
  Eigen::VectorXd b = Eigen::VectorXd::Ones(g.rows()).normalized();
  double lip = 0.0;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd gb = g * b;
    const double nrm = gb.norm();
    if (nrm == 0.0) break;
    lip = nrm;
    b = gb / nrm;
  }
  lip = 2.0 * std::max(lip, 1e-300);
  Eigen::VectorXd a = start;
  Eigen::VectorXd y = a;
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd next = project_simplex(y - (2.0 / lip) * (g * y));
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - a);
    a = std::move(next);
    t = t_next;
  }
  return a;
}

void clamp_weights(Eigen::VectorXd& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < 0.0) {
      if (a[i] < -kWeightClamp) throw InternalError("min_norm_point: weight below -1e-12");
      a[i] = 0.0;
    }
  }
  const double total = a.sum();
  if (!(total > 0.0)) throw InternalError("min_norm_point: weights collapsed");
  a /= total;
}

}  // namespace

Vector project_simplex(const Vector& v) {
  const Eigen::Index n = v.size();
  require(n > 0, "project_simplex: empty vector");
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumsum += sorted[static_cast<std::size_t>(i)];
    const double candidate = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (sorted[static_cast<std::size_t>(i)] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

double wolfe_gap(std::span<const Vector> vectors, const Vector& s) {
  const double s2 = s.squaredNorm();
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& v : vectors) worst = std::max(worst, -(v - s).dot(s) / (1.0 + s2));
  return worst;
}

MinNormResult min_norm_point(std::span<const Vector> vectors, const MinNormOptions& opts) {
  std::vector<std::size_t> all(vectors.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return min_norm_point(vectors, all, opts);
}

MinNormResult min_norm_point(std::span<const Vector> pool, std::span<const std::size_t> indices,
                             const MinNormOptions& opts) {
  // The problem is scale-equivariant; work on unit-scale columns.
  const Matrix raw = gather(pool, indices);
  const double raw_scale = std::sqrt(raw.colwise().squaredNorm().maxCoeff());
  const Matrix p = raw_scale > 0.0 ? Matrix(raw / raw_scale) : raw;
  const Eigen::Index m = p.cols();
  const Eigen::Index dim = p.rows();
  const Eigen::VectorXd norms2 = p.colwise().squaredNorm().transpose();
  const double scale = norms2.maxCoeff();
  const int max_major = opts.max_major > 0 ? opts.max_major : static_cast<int>(50 * (m + dim));

  // Corral: active columns and their (positive) weights.
  std::vector<Eigen::Index> corral;
  std::vector<double> lam;
  Eigen::Index start = 0;
  norms2.minCoeff(&start);
  corral.push_back(start);
  lam.push_back(1.0);
  Vector x = p.col(start);

  MinNormResult result;
  bool optimal = false;
  int major = 0;
  for (; major < max_major; ++major) {
    const Eigen::VectorXd dots = p.transpose() * x;
    Eigen::Index entering = 0;
    const double best = dots.minCoeff(&entering);
    const double x2 = x.squaredNorm();
    if (best >= x2 - opts.tol * scale) {
      optimal = true;
      break;
    }
    if (std::find(corral.begin(), corral.end(), entering) != corral.end()) break;
    corral.push_back(entering);
    lam.push_back(0.0);

    for (;;) {
      Matrix q(dim, static_cast<Eigen::Index>(corral.size()));
      for (std::size_t c = 0; c < corral.size(); ++c) q.col(static_cast<Eigen::Index>(c)) = p.col(corral[c]);
      const AffineSolve aff = affine_minimizer(q);
      if (!aff.ok) {
        // Affinely dependent corral: drop the lightest old vertex.
        std::size_t drop = 0;
        double lightest = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c + 1 < corral.size(); ++c) {
          if (lam[c] < lightest) {
            lightest = lam[c];
            drop = c;
          }
        }
        const double freed = lam[drop];
        corral.erase(corral.begin() + static_cast<std::ptrdiff_t>(drop));
        lam.erase(lam.begin() + static_cast<std::ptrdiff_t>(drop));
        lam.back() += freed;
        if (corral.size() == 1) {
          lam[0] = 1.0;
          break;
        }
        continue;
      }
      bool interior = true;
      for (Eigen::Index c = 0; c < aff.mu.size(); ++c) interior = interior && aff.mu[c] > 0.0;
      if (interior) {
        for (std::size_t c = 0; c < lam.size(); ++c) lam[c] = aff.mu[static_cast<Eigen::Index>(c)];
        break;
      }
      double theta = 1.0;
      std::size_t hit = 0;
      for (std::size_t c = 0; c < lam.size(); ++c) {
        const double mu = aff.mu[static_cast<Eigen::Index>(c)];
        if (mu <= 0.0) {
          const double t = lam[c] / (lam[c] - mu);
          if (t < theta) {
            theta = t;
            hit = c;
          }
        }
      }
      for (std::size_t c = 0; c < lam.size(); ++c) {
        lam[c] = theta * aff.mu[static_cast<Eigen::Index>(c)] + (1.0 - theta) * lam[c];
      }
      lam[hit] = 0.0;
      for (std::size_t c = lam.size(); c-- > 0;) {
        if (lam[c] <= 0.0) {
          corral.erase(corral.begin() + static_cast<std::ptrdiff_t>(c));
          lam.erase(lam.begin() + static_cast<std::ptrdiff_t>(c));
        }
      }
      if (corral.size() == 1) {
        lam[0] = 1.0;
        break;
      }
    }
    Vector next = Vector::Zero(dim);
    for (std::size_t c = 0; c < corral.size(); ++c) next += lam[c] * p.col(corral[c]);
    x = std::move(next);
  }

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
  for (std::size_t c = 0; c < corral.size(); ++c) alpha[corral[c]] += lam[c];
  clamp_weights(alpha);

  if (!optimal) {
    const long long mm = std::max<long long>(m, dim);
    const int iters = static_cast<int>(std::min<long long>(10 * mm * mm, 100000));
    Eigen::VectorXd refined = projected_gradient(p, alpha, iters);
    clamp_weights(refined);
    if ((p * refined).squaredNorm() < (p * alpha).squaredNorm()) alpha = std::move(refined);
    result.used_fallback = true;
  }

  result.major_iterations = major;
  result.point = raw * alpha;
  result.alpha.weights.assign(alpha.data(), alpha.data() + m);
  result.alpha.index_set.assign(indices.begin(), indices.end());
  return result;
}

Vector project_halfspace(const Vector& x, const Halfspace& h) {
  require(x.size() == h.anchor.size() && x.size() == h.normal.size(),
          "project_halfspace: dimension mismatch");
  const double nn = h.normal.squaredNorm();
  require(nn > 0.0, "project_halfspace: zero normal");
  const double gap = (x - h.anchor).dot(h.normal);
  if (gap <= 0.0) return x;
  return x - (gap / nn) * h.normal;
}

}  // namespace monobundle
