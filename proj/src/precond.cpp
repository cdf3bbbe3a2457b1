#include "skr/precond.hpp"

#include <algorithm>
#include <cmath>

namespace skr {

namespace {

void check_diagonal(const CsrMatrix& a, std::vector<Index>& diag_pos) {
  diag_pos.assign(a.rows(), -1);
  for (Index i = 0; i < a.rows(); ++i) {
    Index p = a.find(i, i);
    if (p < 0 || a.values()[p] == 0.0)
      throw ZeroPivotError("zero or missing diagonal at row " + std::to_string(i),
                           i);
    diag_pos[i] = p;
  }
}

CsrMatrix lower_part(const CsrMatrix& a) {
  std::vector<Triplet> t;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
      if (a.col_idx()[p] <= i) t.push_back({i, a.col_idx()[p], a.values()[p]});
  return assemble_csr(t, a.rows(), a.cols());
}

}  // namespace

std::string_view to_string(PrecondKind kind) {
  switch (kind) {
    case PrecondKind::None: return "none";
    case PrecondKind::Jacobi: return "jacobi";
    case PrecondKind::BlockJacobi: return "bjacobi";
    case PrecondKind::Sor: return "sor";
    case PrecondKind::Ilu0: return "ilu0";
    case PrecondKind::Icc0: return "icc0";
  }
  return "?";
}

PrecondKind parse_precond_kind(std::string_view name) {
  if (name == "none") return PrecondKind::None;
  if (name == "jacobi") return PrecondKind::Jacobi;
  if (name == "bjacobi") return PrecondKind::BlockJacobi;
  if (name == "sor") return PrecondKind::Sor;
  if (name == "ilu0" || name == "ilu") return PrecondKind::Ilu0;
  if (name == "icc0" || name == "icc") return PrecondKind::Icc0;
  throw std::invalid_argument("unknown preconditioner '" + std::string(name) +
                              "'");
}

Preconditioner build_preconditioner(const CsrMatrix& a,
                                    const PrecondOptions& opts) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("preconditioner: matrix not square");
  Preconditioner m;
  m.opts_ = opts;
  m.n_ = a.rows();
  const Index n = a.rows();

  switch (opts.kind) {
    case PrecondKind::None:
      break;

    case PrecondKind::Jacobi:
      check_diagonal(a, m.diag_pos_);
      m.diag_ = a.diagonal();
      m.diag_pos_.clear();
      break;

    case PrecondKind::BlockJacobi: {
      if (opts.bjacobi_block < 1)
        throw std::invalid_argument("bjacobi block size must be >= 1");
      const Index bs = opts.bjacobi_block;
      for (Index start = 0; start < n; start += bs) {
        const Index len = std::min(bs, n - start);
        DenseMatrix block = DenseMatrix::Zero(len, len);
        for (Index i = start; i < start + len; ++i)
          for (Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
            Index j = a.col_idx()[p];
            if (j >= start && j < start + len)
              block(i - start, j - start) = a.values()[p];
          }
        Eigen::PartialPivLU<DenseMatrix> lu(block);
        const auto& f = lu.matrixLU();
        for (Index d = 0; d < len; ++d)
          if (f(d, d) == 0.0)
            throw ZeroPivotError("singular diagonal block starting at row " +
                                     std::to_string(start),
                                 start + d);
        m.blocks_.push_back(std::move(lu));
      }
      break;
    }

    case PrecondKind::Sor:
      if (!(opts.sor_omega > 0.0 && opts.sor_omega < 2.0))
        throw std::invalid_argument("SOR omega must lie in (0, 2)");
      check_diagonal(a, m.diag_pos_);
      m.pattern_ = a;
      break;

    case PrecondKind::Ilu0: {
      check_diagonal(a, m.diag_pos_);
      m.pattern_ = a;
      auto rp = a.row_ptr();
      auto ci = a.col_idx();
      std::vector<double> lu(a.values().begin(), a.values().end());
      std::vector<Index> where(n, -1);
      for (Index i = 0; i < n; ++i) {
        for (Index p = rp[i]; p < rp[i + 1]; ++p) where[ci[p]] = p;
        for (Index p = rp[i]; p < rp[i + 1] && ci[p] < i; ++p) {
          const Index k = ci[p];
          const double pivot = lu[m.diag_pos_[k]];
          lu[p] /= pivot;
          for (Index q = m.diag_pos_[k] + 1; q < rp[k + 1]; ++q) {
            Index w = where[ci[q]];
            if (w >= 0) lu[w] -= lu[p] * lu[q];
          }
        }
        for (Index p = rp[i]; p < rp[i + 1]; ++p) where[ci[p]] = -1;
        if (lu[m.diag_pos_[i]] == 0.0 || !std::isfinite(lu[m.diag_pos_[i]]))
          throw ZeroPivotError("ILU(0) zero pivot at row " + std::to_string(i), i);
      }
      m.factor_ = std::move(lu);
      break;
    }

    case PrecondKind::Icc0: {
      if (!is_symmetric(a))
        throw std::invalid_argument("IC(0) requires a symmetric matrix");
      std::vector<Index> dpos;
      check_diagonal(a, dpos);
      // Factor sign*A, which has a positive diagonal, as L L^T.
      m.icc_sign_ = a.values()[dpos[0]] > 0.0 ? 1.0 : -1.0;
      for (Index i = 0; i < n; ++i)
        if (a.values()[dpos[i]] * m.icc_sign_ <= 0.0)
          throw ZeroPivotError("IC(0) needs a definite-sign diagonal; row " +
                                   std::to_string(i),
                               i);
      m.pattern_ = lower_part(a);
      const CsrMatrix& low = m.pattern_;
      auto rp = low.row_ptr();
      auto ci = low.col_idx();
      std::vector<double> l(low.values().begin(), low.values().end());
      for (double& v : l) v *= m.icc_sign_;
      m.diag_pos_.assign(n, -1);
      for (Index i = 0; i < n; ++i) {
        for (Index p = rp[i]; p < rp[i + 1]; ++p) {
          const Index j = ci[p];
          // sum_{k<j} l_ik l_jk over the shared pattern of rows i and j
          double s = 0.0;
          Index q = rp[i], r = rp[j];
          while (q < p && r < rp[j + 1] && ci[r] < j) {
            if (ci[q] == ci[r]) {
              s += l[q] * l[r];
              ++q;
              ++r;
            } else if (ci[q] < ci[r]) {
              ++q;
            } else {
              ++r;
            }
          }
          if (j < i) {
            l[p] = (l[p] - s) / l[rp[j + 1] - 1];
          } else {
            const double d = l[p] - s;
            if (!(d > 0.0))
              throw ZeroPivotError(
                  "IC(0) non-positive pivot at row " + std::to_string(i), i);
            l[p] = std::sqrt(d);
            m.diag_pos_[i] = p;
          }
        }
      }
      m.factor_ = std::move(l);
      break;
    }
  }
  return m;
}

void Preconditioner::apply_lower(std::span<const double> v,
                                 std::span<double> z) const {
  auto rp = pattern_.row_ptr();
  auto ci = pattern_.col_idx();
  for (Index i = 0; i < n_; ++i) {
    double s = v[i];
    for (Index p = rp[i]; p < diag_pos_[i]; ++p) s -= factor_[p] * z[ci[p]];
    z[i] = s;
  }
}

void Preconditioner::apply_upper(std::span<double> z) const {
  auto rp = pattern_.row_ptr();
  auto ci = pattern_.col_idx();
  for (Index i = n_ - 1; i >= 0; --i) {
    double s = z[i];
    for (Index p = diag_pos_[i] + 1; p < rp[i + 1]; ++p)
      s -= factor_[p] * z[ci[p]];
    z[i] = s / factor_[diag_pos_[i]];
  }
}

void Preconditioner::apply(std::span<const double> v,
                           std::span<double> z) const {
  if (static_cast<Index>(v.size()) != n_ || static_cast<Index>(z.size()) != n_)
    throw DimensionError("preconditioner apply: length mismatch");
  switch (opts_.kind) {
    case PrecondKind::None:
      std::copy(v.begin(), v.end(), z.begin());
      break;

    case PrecondKind::Jacobi:
      for (Index i = 0; i < n_; ++i) z[i] = v[i] / diag_[i];
      break;

    case PrecondKind::BlockJacobi: {
      const Index bs = opts_.bjacobi_block;
      // Blocks are independent.
      const Index nb = static_cast<Index>(blocks_.size());
#pragma omp parallel for schedule(static) if (nb > 16)
      for (Index b = 0; b < nb; ++b) {
        const Index start = b * bs;
        const Index len = blocks_[b].rows();
        Eigen::Map<const Vector> vin(v.data() + start, len);
        Eigen::Map<Vector> zout(z.data() + start, len);
        zout = blocks_[b].solve(vin);
      }
      break;
    }

    case PrecondKind::Sor: {
      // (D/omega + L) z = v, forward sweep on A's lower triangle.
      auto rp = pattern_.row_ptr();
      auto ci = pattern_.col_idx();
      auto va = pattern_.values();
      const double omega = opts_.sor_omega;
      for (Index i = 0; i < n_; ++i) {
        double s = v[i];
        for (Index p = rp[i]; p < diag_pos_[i]; ++p) s -= va[p] * z[ci[p]];
        z[i] = s * omega / va[diag_pos_[i]];
      }
      break;
    }

    case PrecondKind::Ilu0:
      apply_lower(v, z);
      apply_upper(z);
      break;

    case PrecondKind::Icc0: {
      // L y = v
      auto rp = pattern_.row_ptr();
      auto ci = pattern_.col_idx();
      for (Index i = 0; i < n_; ++i) {
        double s = v[i];
        for (Index p = rp[i]; p < diag_pos_[i]; ++p) s -= factor_[p] * z[ci[p]];
        z[i] = s / factor_[diag_pos_[i]];
      }
      // L^T z = y, column sweep over the rows of L
      for (Index i = n_ - 1; i >= 0; --i) {
        z[i] /= factor_[diag_pos_[i]];
        for (Index p = rp[i]; p < diag_pos_[i]; ++p) z[ci[p]] -= factor_[p] * z[i];
      }
      if (icc_sign_ < 0.0)
        for (Index i = 0; i < n_; ++i) z[i] = -z[i];
      break;
    }
  }
}

Vector Preconditioner::apply(const Vector& v) const {
  Vector z(v.size());
  apply(as_span(v), as_span(z));
  return z;
}

CsrMatrix Preconditioner::lower_factor() const {
  std::vector<Triplet> t;
  if (opts_.kind == PrecondKind::Ilu0) {
    for (Index i = 0; i < n_; ++i) {
      for (Index p = pattern_.row_ptr()[i]; p < diag_pos_[i]; ++p)
        t.push_back({i, pattern_.col_idx()[p], factor_[p]});
      t.push_back({i, i, 1.0});
    }
  } else if (opts_.kind == PrecondKind::Icc0) {
    for (Index i = 0; i < n_; ++i)
      for (Index p = pattern_.row_ptr()[i]; p <= diag_pos_[i]; ++p)
        t.push_back({i, pattern_.col_idx()[p], factor_[p]});
  } else {
    return {};
  }
  return assemble_csr(t, n_, n_);
}

CsrMatrix Preconditioner::upper_factor() const {
  std::vector<Triplet> t;
  if (opts_.kind == PrecondKind::Ilu0) {
    for (Index i = 0; i < n_; ++i)
      for (Index p = diag_pos_[i]; p < pattern_.row_ptr()[i + 1]; ++p)
        t.push_back({i, pattern_.col_idx()[p], factor_[p]});
  } else if (opts_.kind == PrecondKind::Icc0) {
    for (Index i = 0; i < n_; ++i)
      for (Index p = pattern_.row_ptr()[i]; p <= diag_pos_[i]; ++p)
        t.push_back({pattern_.col_idx()[p], i, icc_sign_ * factor_[p]});
  } else {
    return {};
  }
  return assemble_csr(t, n_, n_);
}

CsrMatrix preconditioner_matrix(const CsrMatrix& a, const Preconditioner& m) {
  if (a.rows() != m.size()) throw DimensionError("preconditioner_matrix: size mismatch");
  const Index n = a.rows();
  const auto& o = m.options();
  std::vector<Triplet> t;
  switch (o.kind) {
    case PrecondKind::None:
      return identity_csr(n);
    case PrecondKind::Jacobi:
      for (Index i = 0; i < n; ++i) t.push_back({i, i, m.jacobi_diagonal()[i]});
      break;
    case PrecondKind::BlockJacobi:
    case PrecondKind::Sor:
      for (Index i = 0; i < n; ++i)
        for (Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
          const Index j = a.col_idx()[p];
          const double v = a.values()[p];
          if (o.kind == PrecondKind::BlockJacobi) {
            if (i / o.bjacobi_block == j / o.bjacobi_block) t.push_back({i, j, v});
          } else if (j < i) {
            t.push_back({i, j, v});
          } else if (j == i) {
            t.push_back({i, j, v / o.sor_omega});
          }
        }
      break;
    case PrecondKind::Ilu0:
    case PrecondKind::Icc0: {
      const CsrMatrix l = m.lower_factor();
      const CsrMatrix u = m.upper_factor();
      for (Index i = 0; i < n; ++i)
        for (Index p = l.row_ptr()[i]; p < l.row_ptr()[i + 1]; ++p) {
          const Index k = l.col_idx()[p];
          for (Index q = u.row_ptr()[k]; q < u.row_ptr()[k + 1]; ++q)
            t.push_back({i, u.col_idx()[q], l.values()[p] * u.values()[q]});
        }
      break;
    }
  }
  return assemble_csr(t, n, n);
}

}  // namespace skr
