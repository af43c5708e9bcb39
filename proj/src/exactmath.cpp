#include "gauth/exactmath.hpp"

#include <algorithm>
#include <utility>

#include "gauth/error.hpp"

namespace gauth::exactmath {
namespace {

void append_u32be(Bytes& out, std::uint32_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 24));
  out.push_back(static_cast<std::uint8_t>(value >> 16));
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value));
}

std::uint32_t read_u32be(std::span<const std::uint8_t> in, std::size_t& offset) {
  if (in.size() < 4 || offset > in.size() - 4) {
    throw Error(ErrorCode::kMalformed, "truncated length field");
  }
  const std::uint32_t value = (std::uint32_t{in[offset]} << 24) |
                              (std::uint32_t{in[offset + 1]} << 16) |
                              (std::uint32_t{in[offset + 2]} << 8) |
                              std::uint32_t{in[offset + 3]};
  offset += 4;
  return value;
}

void append_magnitude(Bytes& out, const mpz_class& value) {
  const std::size_t len = (mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8;
  if (sgn(value) == 0) {
    append_u32be(out, 0);
    return;
  }
  append_u32be(out, static_cast<std::uint32_t>(len));
  const std::size_t start = out.size();
  out.resize(start + len);
  std::size_t written = 0;
  mpz_export(out.data() + start, &written, 1, 1, 1, 0, value.get_mpz_t());
}

mpz_class read_magnitude(std::span<const std::uint8_t> in, std::size_t& offset) {
  const std::uint32_t len = read_u32be(in, offset);
  if (len > in.size() - offset) {
    throw Error(ErrorCode::kMalformed, "truncated magnitude");
  }
  mpz_class value;
  if (len > 0) {
    if (in[offset] == 0) {
      throw Error(ErrorCode::kMalformed, "non-canonical magnitude: leading zero");
    }
    mpz_import(value.get_mpz_t(), len, 1, 1, 1, 0, in.data() + offset);
  }
  offset += len;
  return value;
}

void require_same_dim(const Vector& u, const Vector& w) {
  if (u.dim() != w.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector dimensions differ: " + std::to_string(u.dim()) +
                    " vs " + std::to_string(w.dim()));
  }
}


// Gram-Schmidt on integer direction vectors. Projection and the classical
// orthogonal vectors depend only on each u_k's direction, so every step can
// rescale to a primitive integer vector and avoid rational normalization.
using IntVec = std::vector<mpz_class>;

struct Directions {
  std::vector<IntVec> dirs;
  std::vector<mpz_class> norms;  // <U_k, U_k>
};

// Multiplies v by the lcm of its denominators; returns the integer vector
// and that factor.
std::pair<IntVec, mpz_class> cleared(const Vector& v) {
  mpz_class l = 1;
  for (const auto& c : v.components()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.value().get_den_mpz_t());
  IntVec out(v.dim());
  for (std::size_t k = 0; k < v.dim(); ++k) {
    out[k] = v[k].value().get_num() * (l / v[k].value().get_den());
  }
  return {std::move(out), std::move(l)};
}

mpz_class int_dot(const IntVec& a, const IntVec& b) {
  mpz_class acc = 0;
  for (std::size_t k = 0; k < a.size(); ++k) mpz_addmul(acc.get_mpz_t(), a[k].get_mpz_t(), b[k].get_mpz_t());
  return acc;
}

void make_primitive(IntVec& v) {
  mpz_class g = 0;
  for (const auto& c : v) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 1) return;
  }
  if (g > 1) {
    for (auto& c : v) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
  }
}

Directions orthogonal_directions(std::span<const Vector> vectors) {
  Directions out;
  for (const auto& b : vectors) {
    IntVec w = cleared(b).first;
    for (std::size_t j = 0; j < out.dirs.size(); ++j) {
      const mpz_class a = int_dot(w, out.dirs[j]);
      if (a == 0) continue;
      for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] *= out.norms[j];
        mpz_submul(w[k].get_mpz_t(), a.get_mpz_t(), out.dirs[j][k].get_mpz_t());
      }
      make_primitive(w);
    }
    if (std::all_of(w.begin(), w.end(), [](const mpz_class& c) { return c == 0; })) {
      throw Error(ErrorCode::kDependentBasis,
                  "Gram-Schmidt produced a zero vector; input is dependent");
    }
    out.norms.push_back(int_dot(w, w));
    out.dirs.push_back(std::move(w));
  }
  return out;
}

// Sum of (<v,U_j> / <U_j,U_j>) U_j over the directions.
Vector project_on_directions(const Vector& v, const Directions& d) {
  const auto [num, scale] = cleared(v);
  std::vector<mpq_class> acc(v.dim());
  mpq_class coeff;
  mpq_class term;
  for (std::size_t j = 0; j < d.dirs.size(); ++j) {
    if (d.dirs[j].size() != v.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "vector and basis dimensions differ");
    }
    coeff.get_num() = int_dot(num, d.dirs[j]);
    coeff.get_den() = d.norms[j] * scale;
    coeff.canonicalize();
    for (std::size_t k = 0; k < acc.size(); ++k) {
      mpz_mul(term.get_num_mpz_t(), coeff.get_num_mpz_t(), d.dirs[j][k].get_mpz_t());
      mpz_set(term.get_den_mpz_t(), coeff.get_den_mpz_t());
      term.canonicalize();
      acc[k] += term;
    }
  }
  std::vector<Scalar> comps;
  comps.reserve(acc.size());
  for (auto& q : acc) comps.emplace_back(std::move(q));
  return Vector(std::move(comps));
}

}  // namespace

static_assert(sizeof(long) == sizeof(std::int64_t), "LP64 target expected");

Scalar::Scalar(std::int64_t value)
    : value_(mpz_class(static_cast<long>(value))) {}

Scalar::Scalar(std::int64_t num, std::int64_t den) {
  if (den == 0) {
    throw Error(ErrorCode::kInvalidArgument, "zero denominator");
  }
  value_ = (Scalar(num) / Scalar(den)).value_;
}

Scalar::Scalar(mpq_class value) : value_(std::move(value)) {
  value_.canonicalize();
}

Scalar Scalar::parse(std::string_view text) {
  const std::string str(text);
  if (str.empty()) {
    throw Error(ErrorCode::kMalformed, "empty scalar");
  }
  const auto slash = str.find('/');
  auto parse_int = [&](const std::string& part) {
    mpz_class z;
    const bool digits_only =
        !part.empty() &&
        part.find_first_not_of("0123456789", part[0] == '-' ? 1 : 0) ==
            std::string::npos &&
        part != "-";
    if (!digits_only || z.set_str(part, 10) != 0) {
      throw Error(ErrorCode::kMalformed, "bad scalar: '" + str + "'");
    }
    return z;
  };
  if (slash == std::string::npos) {
    return Scalar(mpq_class(parse_int(str)));
  }
  const mpz_class num = parse_int(str.substr(0, slash));
  const mpz_class den = parse_int(str.substr(slash + 1));
  if (sgn(den) == 0) {
    throw Error(ErrorCode::kMalformed, "bad scalar: zero denominator");
  }
  return Scalar(mpq_class(num, den));
}

std::string Scalar::to_string() const {
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

Scalar& Scalar::operator+=(const Scalar& o) {
  value_ += o.value_;
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  value_ -= o.value_;
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  value_ *= o.value_;
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.is_zero()) {
    throw Error(ErrorCode::kInvalidArgument, "division by zero");
  }
  value_ /= o.value_;
  return *this;
}

bool Vector::is_zero() const {
  for (const auto& c : components_) {
    if (!c.is_zero()) return false;
  }
  return true;
}

Vector Vector::scaled(const Scalar& factor) const {
  Vector out(dim());
  for (std::size_t k = 0; k < dim(); ++k) out[k] = components_[k] * factor;
  return out;
}

Vector& Vector::operator+=(const Vector& o) {
  require_same_dim(*this, o);
  for (std::size_t k = 0; k < dim(); ++k) components_[k] += o[k];
  return *this;
}

Vector& Vector::operator-=(const Vector& o) {
  require_same_dim(*this, o);
  for (std::size_t k = 0; k < dim(); ++k) components_[k] -= o[k];
  return *this;
}

Basis::Basis(std::vector<Vector> vectors) : vectors_(std::move(vectors)) {
  if (vectors_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "basis must have at least one vector");
  }
  const std::size_t d = vectors_.front().dim();
  for (const auto& v : vectors_) {
    if (v.dim() != d) {
      throw Error(ErrorCode::kDimensionMismatch, "basis vectors differ in dimension");
    }
  }
  if (vectors_.size() >= d) {
    throw Error(ErrorCode::kInvalidArgument,
                "basis size n=" + std::to_string(vectors_.size()) +
                    " must be below the ambient dimension d=" + std::to_string(d));
  }
  if (rank(vectors_) != vectors_.size()) {
    throw Error(ErrorCode::kDependentBasis, "basis vectors are linearly dependent");
  }
}

Basis Basis::scaled(const Scalar& factor) const {
  if (factor.is_zero()) {
    throw Error(ErrorCode::kDegenerate, "cannot scale a basis by zero");
  }
  std::vector<Vector> out;
  out.reserve(size());
  for (const auto& v : vectors_) out.push_back(v.scaled(factor));
  return Basis(std::move(out), Trusted{});
}

Scalar inner_product(const Vector& u, const Vector& w) {
  require_same_dim(u, w);
  mpq_class acc(0);
  mpq_class term;
  for (std::size_t k = 0; k < u.dim(); ++k) {
    mpq_mul(term.get_mpq_t(), u[k].value().get_mpq_t(), w[k].value().get_mpq_t());
    acc += term;
  }
  return Scalar(std::move(acc));
}

Basis gram_schmidt(const Basis& basis) {
  const Directions d = orthogonal_directions(basis.vectors());
  std::vector<Vector> out;
  out.reserve(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    // u_k is the component of b_k along U_k.
    out.push_back(project_on_directions(basis[k], Directions{{d.dirs[k]}, {d.norms[k]}}));
  }
  return Basis(std::move(out), Basis::Trusted{});
}

Vector project_orthogonal(const Vector& v, std::span<const Vector> orthogonal) {
  Vector out(v.dim());
  for (const auto& b : orthogonal) {
    require_same_dim(v, b);
    out += b.scaled(inner_product(v, b) / inner_product(b, b));
  }
  return out;
}

Vector project(const Vector& v, const Basis& basis) {
  return project_on_directions(v, orthogonal_directions(basis.vectors()));
}

std::size_t rank(std::span<const Vector> vectors) {
  if (vectors.empty()) return 0;
  const std::size_t cols = vectors.front().dim();
  // Clear denominators row by row; row scaling does not change rank.
  std::vector<std::vector<mpz_class>> m;
  m.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (v.dim() != cols) {
      throw Error(ErrorCode::kDimensionMismatch, "rank: vectors differ in dimension");
    }
    mpz_class lcm(1);
    for (const auto& c : v.components()) {
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.value().get_den_mpz_t());
    }
    std::vector<mpz_class> row(cols);
    for (std::size_t k = 0; k < cols; ++k) {
      row[k] = v[k].value().get_num() * (lcm / v[k].value().get_den());
    }
    m.push_back(std::move(row));
  }

  // Bareiss: every division below is exact.
  const std::size_t rows = m.size();
  std::size_t r = 0;
  mpz_class prev_pivot(1);
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && sgn(m[pivot][c]) == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t k = c + 1; k < cols; ++k) {
        m[i][k] = (m[r][c] * m[i][k] - m[i][c] * m[r][k]);
        mpz_divexact(m[i][k].get_mpz_t(), m[i][k].get_mpz_t(),
                     prev_pivot.get_mpz_t());
      }
      m[i][c] = 0;
    }
    prev_pivot = m[r][c];
    ++r;
  }
  return r;
}

Vector sample_vector(Rng& rng, std::size_t dim) {
  Vector out(dim);
  for (std::size_t k = 0; k < dim; ++k) out[k] = Scalar(rng.nonzero_int32_range());
  return out;
}

Basis sample_basis(Rng& rng, std::size_t dim, std::size_t n) {
  if (n < 1 || n >= dim) {
    throw Error(ErrorCode::kInvalidArgument,
                "need 1 <= n < d (got n=" + std::to_string(n) +
                    ", d=" + std::to_string(dim) + ")");
  }
  for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
    std::vector<Vector> vectors;
    vectors.reserve(n);
    for (std::size_t i = 0; i < n; ++i) vectors.push_back(sample_vector(rng, dim));
    if (rank(vectors) == n) return Basis(std::move(vectors));
  }
  throw Error(ErrorCode::kDependentBasis,
              "sampled vectors stayed dependent after 16 resamples");
}

void append_encoding(Bytes& out, const Scalar& s) {
  out.push_back(s.sign() < 0 ? 0x01 : 0x00);
  append_magnitude(out, abs(s.value().get_num()));
  append_magnitude(out, s.value().get_den());
}

void append_encoding(Bytes& out, const Vector& v) {
  append_u32be(out, static_cast<std::uint32_t>(v.dim()));
  for (const auto& c : v.components()) append_encoding(out, c);
}

Bytes encode(const Scalar& s) {
  Bytes out;
  append_encoding(out, s);
  return out;
}

Bytes encode(const Vector& v) {
  Bytes out;
  append_encoding(out, v);
  return out;
}

Scalar decode_scalar(std::span<const std::uint8_t> in, std::size_t& offset) {
  if (offset >= in.size()) {
    throw Error(ErrorCode::kMalformed, "truncated scalar");
  }
  const std::uint8_t sign = in[offset++];
  if (sign > 1) {
    throw Error(ErrorCode::kMalformed, "bad sign byte");
  }
  mpz_class num = read_magnitude(in, offset);
  const mpz_class den = read_magnitude(in, offset);
  if (sgn(den) == 0) {
    throw Error(ErrorCode::kMalformed, "zero denominator");
  }
  if (sign == 1 && sgn(num) == 0) {
    throw Error(ErrorCode::kMalformed, "negative zero");
  }
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (g != 1) {
    throw Error(ErrorCode::kMalformed, "scalar not in lowest terms");
  }
  if (sign == 1) num = -num;
  mpq_class q;
  mpq_set_num(q.get_mpq_t(), num.get_mpz_t());
  mpq_set_den(q.get_mpq_t(), den.get_mpz_t());
  return Scalar(std::move(q));
}

Scalar decode_scalar(std::span<const std::uint8_t> in) {
  std::size_t offset = 0;
  Scalar s = decode_scalar(in, offset);
  if (offset != in.size()) {
    throw Error(ErrorCode::kMalformed, "trailing bytes after scalar");
  }
  return s;
}

Vector decode_vector(std::span<const std::uint8_t> in, std::size_t& offset) {
  const std::uint32_t count = read_u32be(in, offset);
  // Each scalar needs at least 9 bytes; guards huge bogus counts.
  if (count > (in.size() - offset) / 9) {
    throw Error(ErrorCode::kMalformed, "vector count exceeds payload");
  }
  std::vector<Scalar> components;
  components.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    components.push_back(decode_scalar(in, offset));
  }
  return Vector(std::move(components));
}

}  // namespace gauth::exactmath
