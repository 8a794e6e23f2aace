#include "bktower/smatrix.hpp"

#include <algorithm>
#include <sstream>

#include "bktower/errors.hpp"

namespace bkt {

SMat SMat::zeros(const PrecisionContext& ctx, long level, long rows, long cols, RingTag tag) {
  SMat m;
  m.rows = rows;
  m.cols = cols;
  m.a.reserve(static_cast<size_t>(rows * cols));
  for (long i = 0; i < rows * cols; ++i) m.a.push_back(TowerElement::zero(ctx, level, tag));
  return m;
}

SMat SMat::identity(const PrecisionContext& ctx, long level, long d, RingTag tag) {
  SMat m = zeros(ctx, level, d, d, tag);
  for (long i = 0; i < d; ++i) m.at(i, i) = TowerElement::constant(ctx, level, 1, tag);
  return m;
}

SMat SMat::basis_column(const PrecisionContext& ctx, long level, long d, long i, RingTag tag) {
  SMat m = zeros(ctx, level, d, 1, tag);
  m.at(i, 0) = TowerElement::constant(ctx, level, 1, tag);
  return m;
}

long SMat::level() const {
  if (a.empty()) fail(Err::ConfigInvalid, "level() on empty matrix");
  return a[0].level;
}

const PrecisionContext& SMat::ctx() const {
  if (a.empty()) fail(Err::ConfigInvalid, "ctx() on empty matrix");
  return *a[0].ctx;
}

static void require_same_shape(const SMat& x, const SMat& y, const char* op) {
  if (x.rows != y.rows || x.cols != y.cols)
    fail(Err::ConfigInvalid, std::string(op) + ": shape mismatch");
}

SMat mat_add(const SMat& x, const SMat& y) {
  require_same_shape(x, y, "mat_add");
  SMat out = x;
  for (size_t i = 0; i < out.a.size(); ++i) out.a[i] = add(x.a[i], y.a[i]);
  return out;
}

SMat mat_sub(const SMat& x, const SMat& y) {
  require_same_shape(x, y, "mat_sub");
  SMat out = x;
  for (size_t i = 0; i < out.a.size(); ++i) out.a[i] = sub(x.a[i], y.a[i]);
  return out;
}

SMat mat_mul(const SMat& x, const SMat& y) {
  if (x.cols != y.rows) fail(Err::ConfigInvalid, "mat_mul: inner dimension mismatch");
  SMat out = SMat::zeros(x.ctx(), x.level(), x.rows, y.cols);
  for (long i = 0; i < x.rows; ++i)
    for (long j = 0; j < y.cols; ++j) {
      TowerElement acc = mul(x.at(i, 0), y.at(0, j));
      for (long k = 1; k < x.cols; ++k) acc = add(acc, mul(x.at(i, k), y.at(k, j)));
      out.at(i, j) = acc;
    }
  return out;
}

SMat mat_scale(const SMat& x, const TowerElement& s) {
  SMat out = x;
  for (auto& v : out.a) v = mul(v, s);
  return out;
}

SMat mat_scale_int(const SMat& x, const mpz_class& z) {
  SMat out = x;
  for (auto& v : out.a) v = mul_int(v, z);
  return out;
}

SMat mat_map(const SMat& x, const std::function<TowerElement(const TowerElement&)>& f) {
  SMat out = x;
  for (auto& v : out.a) v = f(v);
  return out;
}

SMat mat_include_up(const SMat& x) {
  return mat_map(x, [](const TowerElement& v) { return include_up(v); });
}
SMat mat_frobenius_down(const SMat& x) {
  return mat_map(x, [](const TowerElement& v) { return frobenius_down(v); });
}
SMat mat_frobenius_self(const SMat& x) {
  return mat_map(x, [](const TowerElement& v) { return frobenius_self(v); });
}
SMat mat_frobenius_inverse(const SMat& x) {
  return mat_map(x, [](const TowerElement& v) { return frobenius_inverse(v); });
}

EqualityReport mat_equality(const SMat& x, const SMat& y) {
  require_same_shape(x, y, "mat_equality");
  EqualityReport worst;
  worst.digits = kExactDigits;
  worst.udeg = kFullDegree;
  worst.first_bad_degree = -1;
  for (size_t i = 0; i < x.a.size(); ++i) {
    EqualityReport r = equality_report(x.a[i], y.a[i]);
    worst.digits = std::min(worst.digits, r.digits);
    worst.udeg = std::min(worst.udeg, r.udeg);
    if (r.first_bad_degree >= 0 &&
        (worst.first_bad_degree < 0 || r.first_bad_degree < worst.first_bad_degree))
      worst.first_bad_degree = r.first_bad_degree;
  }
  return worst;
}

ZeroWindow mat_zero_window(const SMat& x) {
  ZeroWindow worst;
  worst.digits = kExactDigits;
  worst.udeg = kFullDegree;
  for (const auto& v : x.a) {
    ZeroWindow w = v.zero_window();
    worst.digits = std::min(worst.digits, w.digits);
    worst.udeg = std::min(worst.udeg, w.udeg);
  }
  return worst;
}

static SMat minor_matrix(const SMat& x, long skip_r, long skip_c) {
  SMat m = SMat::zeros(x.ctx(), x.level(), x.rows - 1, x.cols - 1);
  long ri = 0;
  for (long i = 0; i < x.rows; ++i) {
    if (i == skip_r) continue;
    long cj = 0;
    for (long j = 0; j < x.cols; ++j) {
      if (j == skip_c) continue;
      m.at(ri, cj) = x.at(i, j);
      ++cj;
    }
    ++ri;
  }
  return m;
}

TowerElement mat_det(const SMat& x) {
  if (!x.is_square()) fail(Err::ConfigInvalid, "mat_det: not square");
  if (x.rows == 1) return x.at(0, 0);
  if (x.rows == 2)
    return sub(mul(x.at(0, 0), x.at(1, 1)), mul(x.at(0, 1), x.at(1, 0)));
  TowerElement acc = TowerElement::zero(x.ctx(), x.level());
  for (long j = 0; j < x.cols; ++j) {
    TowerElement term = mul(x.at(0, j), mat_det(minor_matrix(x, 0, j)));
    acc = (j % 2 == 0) ? add(acc, term) : sub(acc, term);
  }
  return acc;
}

SMat mat_adjugate(const SMat& x) {
  if (!x.is_square()) fail(Err::ConfigInvalid, "mat_adjugate: not square");
  long d = x.rows;
  SMat out = SMat::zeros(x.ctx(), x.level(), d, d);
  if (d == 1) {
    out.at(0, 0) = TowerElement::constant(x.ctx(), x.level(), 1);
    return out;
  }
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) {
      TowerElement cof = mat_det(minor_matrix(x, i, j));
      if ((i + j) % 2 != 0) cof = neg(cof);
      out.at(j, i) = cof;  // adjugate = transposed cofactor matrix
    }
  return out;
}

// Strictly-triangular nilpotent part N gives exact inverse
// (I + N)^-1 = I - N + N^2 - ... (terminates at d terms).
static SMat unitriangular_inverse(const SMat& u) {
  long d = u.rows;
  SMat n = mat_sub(u, SMat::identity(u.ctx(), u.level(), d));
  SMat inv = SMat::identity(u.ctx(), u.level(), d);
  SMat pw = SMat::identity(u.ctx(), u.level(), d);
  for (long k = 1; k < d; ++k) {
    pw = mat_mul(pw, n);
    inv = (k % 2 == 1) ? mat_sub(inv, pw) : mat_add(inv, pw);
  }
  return inv;
}

static TowerElement random_poly(const PrecisionContext& ctx, long max_deg, Rng& rng) {
  std::vector<mpz_class> c(static_cast<size_t>(max_deg) + 1);
  for (auto& z : c) z = rng.range(-ctx.p, ctx.p);
  return TowerElement::from_coeffs(ctx, 0, c);
}

SMat random_unimodular(const PrecisionContext& ctx, long d, long max_deg, Rng& rng, SMat* inv) {
  SMat lower = SMat::identity(ctx, 0, d);
  SMat upper = SMat::identity(ctx, 0, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < i; ++j) {
      lower.at(i, j) = random_poly(ctx, max_deg, rng);
      upper.at(j, i) = random_poly(ctx, max_deg, rng);
    }
  std::vector<long> perm(static_cast<size_t>(d));
  for (long i = 0; i < d; ++i) perm[static_cast<size_t>(i)] = i;
  for (long i = d - 1; i > 0; --i)
    std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(rng.below(static_cast<uint64_t>(i + 1)))]);

  SMat pm = SMat::zeros(ctx, 0, d, d);
  SMat pm_inv = SMat::zeros(ctx, 0, d, d);
  for (long i = 0; i < d; ++i) {
    pm.at(i, perm[static_cast<size_t>(i)]) = TowerElement::constant(ctx, 0, 1);
    pm_inv.at(perm[static_cast<size_t>(i)], i) = TowerElement::constant(ctx, 0, 1);
  }

  SMat m = mat_mul(mat_mul(lower, upper), pm);
  if (inv) *inv = mat_mul(pm_inv, mat_mul(unitriangular_inverse(upper), unitriangular_inverse(lower)));
  return m;
}

std::string mat_str(const SMat& x) {
  std::ostringstream os;
  os << "[" << x.rows << "x" << x.cols << "]\n";
  for (long i = 0; i < x.rows; ++i)
    for (long j = 0; j < x.cols; ++j)
      os << "  (" << i << "," << j << ") " << x.at(i, j).str() << "\n";
  return os.str();
}

}  // namespace bkt
