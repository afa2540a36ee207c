#include "usm/qr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "usm/error.hpp"
#include "usm/series.hpp"

namespace usm {

namespace {

// Row of the matrix being reduced: explicit entries for [lo, lo + vals.size())
// and fill coefficients for everything to the right.
template <class T>
struct WorkRow {
  std::size_t lo = 0;
  std::vector<T> vals;
  std::vector<T> alpha;

  std::size_t hi() const { return lo + vals.size(); }
};

template <class T>
T combine_fill(std::span<const T> alpha, const std::vector<T>& top, std::size_t n, std::size_t j) {
  T acc(0);
  for (std::size_t r = 0; r < alpha.size(); ++r) acc += alpha[r] * top[r * n + j];
  return acc;
}

}  // namespace

template <class T>
T QrFactorization<T>::fill(const Row& row, std::size_t j) const {
  return combine_fill(std::span<const T>(row.alpha), top_, n_, j);
}

template <class T>
T QrFactorization<T>::r_entry(std::size_t i, std::size_t j) const {
  if (j < i) return T(0);
  const Row& row = rows_[i];
  if (j < i + row.vals.size()) return row.vals[j - i];
  return fill(row, j);
}

template <class T>
QrFactorization<T> qr_factor(const AlmostBandedMatrix<T>& a) {
  using std::hypot;
  const std::size_t n = a.n();
  const std::size_t dense = a.num_dense_rows();
  const std::size_t m = a.hessenberg();

  QrFactorization<T> qr;
  qr.n_ = n;
  qr.m_ = m;
  qr.dense_rows_ = dense;
  qr.top_.reserve(dense * n);
  for (std::size_t r = 0; r < dense; ++r) {
    for (const auto& v : a.dense_row(r)) qr.top_.push_back(v);
  }
  const auto& top = qr.top_;

  std::vector<WorkRow<T>> work(n);
  for (std::size_t i = 0; i < n; ++i) {
    WorkRow<T>& w = work[i];
    w.alpha.assign(dense, T(0));
    if (i < dense) {
      w.alpha[i] = T(1);
    } else {
      const auto& band = a.banded();
      const std::size_t r = i - dense;
      w.lo = band.row_begin(r);
      for (std::size_t j = w.lo; j < band.row_end(r); ++j) w.vals.push_back(band.at(r, j));
    }
  }

  auto value = [&](const WorkRow<T>& w, std::size_t j) -> T {
    if (j < w.lo) return T(0);
    if (j < w.hi()) return w.vals[j - w.lo];
    return combine_fill(std::span<const T>(w.alpha), top, n, j);
  };
  auto align_left = [](WorkRow<T>& w, std::size_t lo) {
    if (w.lo < lo) {
      // Entries left of the active column are already exactly zero.
      const std::size_t drop = std::min(lo - w.lo, w.vals.size());
      w.vals.erase(w.vals.begin(), w.vals.begin() + static_cast<std::ptrdiff_t>(drop));
    } else if (w.lo > lo) {
      w.vals.insert(w.vals.begin(), w.lo - lo, T(0));
    }
    w.lo = lo;
  };
  auto extend_right = [&](WorkRow<T>& w, std::size_t hi) {
    for (std::size_t j = w.hi(); j < hi; ++j) {
      w.vals.push_back(combine_fill(std::span<const T>(w.alpha), top, n, j));
    }
  };

  qr.rows_.resize(n);
  qr.col_offsets_.reserve(n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    qr.col_offsets_.push_back(qr.rotations_.size());
    const std::size_t last = std::min(n - 1, j + m);
    for (std::size_t i = last; i > j; --i) {
      WorkRow<T>& lower = work[i];
      WorkRow<T>& upper = work[i - 1];
      if (value(lower, j) == T(0)) continue;
      align_left(lower, j);
      align_left(upper, j);
      const std::size_t hi = std::max({lower.hi(), upper.hi(), j + 1});
      extend_right(lower, hi);
      extend_right(upper, hi);

      const T& x0 = upper.vals[0];
      const T& y0 = lower.vals[0];
      T r = hypot(x0, y0);
      T c = x0 / r;
      T s = y0 / r;
      for (std::size_t t = 1; t < upper.vals.size(); ++t) {
        T x = upper.vals[t];
        T y = lower.vals[t];
        upper.vals[t] = c * x + s * y;
        lower.vals[t] = c * y - s * x;
      }
      for (std::size_t t = 0; t < dense; ++t) {
        T x = upper.alpha[t];
        T y = lower.alpha[t];
        upper.alpha[t] = c * x + s * y;
        lower.alpha[t] = c * y - s * x;
      }
      upper.vals[0] = std::move(r);
      lower.vals[0] = T(0);
      qr.rotations_.push_back({i - 1, j, std::move(c), std::move(s)});
    }

    WorkRow<T>& pivot = work[j];
    align_left(pivot, j);
    extend_right(pivot, j + 1);
    if (pivot.vals[0] == T(0)) {
      throw SingularMatrixError(j, "QR: zero pivot in column " + std::to_string(j));
    }
    qr.rows_[j].vals = std::move(pivot.vals);
    qr.rows_[j].alpha = std::move(pivot.alpha);
    pivot = WorkRow<T>{};
  }
  qr.col_offsets_.push_back(qr.rotations_.size());
  return qr;
}

template <class T>
std::vector<T> apply_qt(const QrFactorization<T>& qr, std::span<const T> f) {
  if (f.size() != qr.n()) fail(ErrorCode::DimensionMismatch, "apply_qt: size mismatch");
  std::vector<T> s(f.begin(), f.end());
  for (const auto& g : qr.rotations()) {
    T x = s[g.row];
    T y = s[g.row + 1];
    s[g.row] = g.c * x + g.s * y;
    s[g.row + 1] = g.c * y - g.s * x;
  }
  return s;
}

template <class T>
std::vector<T> apply_qt_unit(const QrFactorization<T>& qr, std::size_t p) {
  const std::size_t n = qr.n();
  if (p >= n) fail(ErrorCode::OutOfRange, "apply_qt_unit: index out of range");
  std::vector<T> s(n, T(0));
  s[p] = T(1);
  const std::size_t first_col = p > qr.m() ? p - qr.m() : 0;
  const auto& rots = qr.rotations();
  for (std::size_t t = qr.col_offsets()[first_col]; t < rots.size(); ++t) {
    const auto& g = rots[t];
    T x = s[g.row];
    T y = s[g.row + 1];
    s[g.row] = g.c * x + g.s * y;
    s[g.row + 1] = g.c * y - g.s * x;
  }
  return s;
}

template <class T>
std::vector<T> back_substitute(const QrFactorization<T>& qr, std::span<const T> s) {
  const std::size_t n = qr.n_;
  const std::size_t dense = qr.dense_rows_;
  if (s.size() != n) fail(ErrorCode::DimensionMismatch, "back_substitute: size mismatch");
  std::vector<T> u(n, T(0));
  // suffix[r * (n + 1) + h] = sum_{j >= h} top(r, j) u_j
  std::vector<T> suffix(dense * (n + 1), T(0));
  for (std::size_t i = n; i-- > 0;) {
    const auto& row = qr.rows_[i];
    const std::size_t hi = i + row.vals.size();
    T acc = s[i];
    for (std::size_t j = i + 1; j < hi; ++j) acc -= row.vals[j - i] * u[j];
    if (dense > 0 && hi < n) {
      T tail(0);
      for (std::size_t r = 0; r < dense; ++r) tail += row.alpha[r] * suffix[r * (n + 1) + hi];
      acc -= tail;
    }
    if (row.vals[0] == T(0)) {
      throw SingularMatrixError(i, "back substitution: zero diagonal at " + std::to_string(i));
    }
    u[i] = acc / row.vals[0];
    for (std::size_t r = 0; r < dense; ++r) {
      suffix[r * (n + 1) + i] = suffix[r * (n + 1) + i + 1] + qr.top_[r * n + i] * u[i];
    }
  }
  return u;
}

template <class T>
std::vector<T> solve_r_transpose(const QrFactorization<T>& qr, std::span<const T> y) {
  const std::size_t n = qr.n_;
  const std::size_t dense = qr.dense_rows_;
  if (y.size() != n) fail(ErrorCode::DimensionMismatch, "solve_r_transpose: size mismatch");
  // Rows grouped by the end of their explicit window (counting sort).
  std::size_t width = 0;
  std::vector<std::size_t> start(n + 2, 0), by_end(n);
  for (std::size_t p = 0; p < n; ++p) {
    width = std::max(width, qr.rows_[p].vals.size());
    ++start[p + qr.rows_[p].vals.size() + 1];
  }
  for (std::size_t h = 1; h <= n + 1; ++h) start[h] += start[h - 1];
  {
    std::vector<std::size_t> next(start.begin(), start.end() - 1);
    for (std::size_t p = 0; p < n; ++p) by_end[next[p + qr.rows_[p].vals.size()]++] = p;
  }
  std::vector<T> z(n, T(0));
  // acc[r] = sum over rows p already past their explicit window of alpha_p[r] z_p
  std::vector<T> acc(dense, T(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = start[i]; t < start[i + 1]; ++t) {
      const std::size_t p = by_end[t];
      for (std::size_t r = 0; r < dense; ++r) acc[r] += qr.rows_[p].alpha[r] * z[p];
    }
    T rhs = y[i];
    for (std::size_t p = i > width ? i - width : 0; p < i; ++p) {
      const auto& row = qr.rows_[p];
      if (i < p + row.vals.size()) rhs -= row.vals[i - p] * z[p];
    }
    for (std::size_t r = 0; r < dense; ++r) rhs -= acc[r] * qr.top_[r * n + i];
    const T& d = qr.rows_[i].vals[0];
    if (d == T(0)) throw SingularMatrixError(i, "R^T solve: zero diagonal");
    z[i] = rhs / d;
  }
  return z;
}

template <class T>
std::vector<T> solve(const QrFactorization<T>& qr, std::span<const T> f) {
  const std::vector<T> s = apply_qt(qr, f);
  return back_substitute(qr, std::span<const T>(s));
}

template <class T>
std::vector<T> solve(const AlmostBandedMatrix<T>& a, std::span<const T> f) {
  return solve(qr_factor(a), f);
}

template <class T>
std::vector<T> accumulate_q(const QrFactorization<T>& qr) {
  const std::size_t n = qr.n();
  if (n > kDenseCutoff) {
    fail(ErrorCode::DenseCutoff, "accumulate_q: n = " + std::to_string(n) + " exceeds " +
                                     std::to_string(kDenseCutoff));
  }
  // G = Q^T built by applying the rotations to the identity, then transposed.
  std::vector<T> g(n * n, T(0));
  for (std::size_t i = 0; i < n; ++i) g[i * n + i] = T(1);
  for (const auto& rot : qr.rotations()) {
    T* x = &g[rot.row * n];
    T* y = &g[(rot.row + 1) * n];
    for (std::size_t c = 0; c < n; ++c) {
      T xv = x[c];
      T yv = y[c];
      x[c] = rot.c * xv + rot.s * yv;
      y[c] = rot.c * yv - rot.s * xv;
    }
  }
  std::vector<T> q(n * n, T(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) q[i * n + j] = g[j * n + i];
  }
  return q;
}

template <class T>
T q_tail_norm(std::span<const T> q, std::size_t n, std::size_t j, std::size_t m) {
  if (j >= n || q.size() != n * n) fail(ErrorCode::OutOfRange, "q_tail_norm: bad row or shape");
  m = std::min(m, n);
  return norm2(q.subspan(j * n + (n - m), m));
}

#define USM_INSTANTIATE(T)                                                               \
  template class QrFactorization<T>;                                                     \
  template QrFactorization<T> qr_factor<T>(const AlmostBandedMatrix<T>&);                \
  template std::vector<T> apply_qt<T>(const QrFactorization<T>&, std::span<const T>);    \
  template std::vector<T> apply_qt_unit<T>(const QrFactorization<T>&, std::size_t);      \
  template std::vector<T> back_substitute<T>(const QrFactorization<T>&, std::span<const T>); \
  template std::vector<T> solve_r_transpose<T>(const QrFactorization<T>&,                \
                                               std::span<const T>);                      \
  template std::vector<T> solve<T>(const QrFactorization<T>&, std::span<const T>);       \
  template std::vector<T> solve<T>(const AlmostBandedMatrix<T>&, std::span<const T>);    \
  template std::vector<T> accumulate_q<T>(const QrFactorization<T>&);                    \
  template T q_tail_norm<T>(std::span<const T>, std::size_t, std::size_t, std::size_t);

USM_INSTANTIATE(double)
USM_INSTANTIATE(BigFloat)

#undef USM_INSTANTIATE

}  // namespace usm
