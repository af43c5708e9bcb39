#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gauth/rng.hpp"

namespace gauth::exactmath {

using Bytes = std::vector<std::uint8_t>;

// Exact rational, always in lowest terms with a positive denominator.
class Scalar {
 public:
  Scalar() = default;
  Scalar(std::int64_t value);  // NOLINT(google-explicit-constructor)
  Scalar(std::int64_t num, std::int64_t den);
  explicit Scalar(mpq_class value);

  // "num/den" or a bare integer "num".
  static Scalar parse(std::string_view text);

  const mpq_class& value() const { return value_; }
  bool is_zero() const { return sgn(value_) == 0; }
  bool is_integer() const { return value_.get_den() == 1; }
  int sign() const { return sgn(value_); }

  // Always "num/den", e.g. "5/1", "-1/2".
  std::string to_string() const;

  Scalar operator-() const { return Scalar(mpq_class(-value_)); }
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.value_ == b.value_;
  }
  friend bool operator<(const Scalar& a, const Scalar& b) {
    return a.value_ < b.value_;
  }

 private:
  mpq_class value_{0};
};

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim) : components_(dim) {}
  explicit Vector(std::vector<Scalar> components)
      : components_(std::move(components)) {}
  Vector(std::initializer_list<Scalar> components) : components_(components) {}

  std::size_t dim() const { return components_.size(); }
  const Scalar& operator[](std::size_t k) const { return components_[k]; }
  Scalar& operator[](std::size_t k) { return components_[k]; }
  std::span<const Scalar> components() const { return components_; }

  bool is_zero() const;
  Vector scaled(const Scalar& factor) const;

  Vector& operator+=(const Vector& o);
  Vector& operator-=(const Vector& o);
  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend bool operator==(const Vector& a, const Vector& b) {
    return a.components_ == b.components_;
  }

 private:
  std::vector<Scalar> components_;
};

// Linearly independent set of 1 <= n < d vectors in Q^d.
class Basis {
 public:
  // Validates dimensions, 1 <= n < d and full rank.
  explicit Basis(std::vector<Vector> vectors);

  std::size_t size() const { return vectors_.size(); }
  std::size_t ambient_dim() const { return vectors_.front().dim(); }
  const Vector& operator[](std::size_t k) const { return vectors_[k]; }
  std::span<const Vector> vectors() const { return vectors_; }

  Basis scaled(const Scalar& factor) const;

  friend bool operator==(const Basis& a, const Basis& b) {
    return a.vectors_ == b.vectors_;
  }

 private:
  struct Trusted {};
  Basis(std::vector<Vector> vectors, Trusted) : vectors_(std::move(vectors)) {}
  friend Basis gram_schmidt(const Basis& basis);

  std::vector<Vector> vectors_;
};

Scalar inner_product(const Vector& u, const Vector& w);

// Classic (unnormalized) Gram-Schmidt; same span, pairwise orthogonal.
Basis gram_schmidt(const Basis& basis);

// Orthogonal projection onto span(basis); orthogonalizes on every call.
Vector project(const Vector& v, const Basis& basis);

// Orthogonal projection given an already orthogonal basis.
Vector project_orthogonal(const Vector& v, std::span<const Vector> orthogonal);

// Exact rank by fraction-free (Bareiss) elimination over the integers.
std::size_t rank(std::span<const Vector> vectors);

// Components uniform over [-2^31, 2^31] \ {0}.
Vector sample_vector(Rng& rng, std::size_t dim);

// Rank-checked sampling of n independent vectors; retries up to 16 times.
Basis sample_basis(Rng& rng, std::size_t dim, std::size_t n);

inline constexpr int kMaxResamples = 16;

// Canonical byte encodings.
//   Scalar: sign byte (0x00 nonneg, 0x01 neg) || u32be len || |num| bytes
//           || u32be len || den bytes
//   Vector: u32be count || Scalar encodings
void append_encoding(Bytes& out, const Scalar& s);
void append_encoding(Bytes& out, const Vector& v);
Bytes encode(const Scalar& s);
Bytes encode(const Vector& v);

// Strict decoders; reject any non-canonical input. `offset` advances past the
// consumed bytes.
Scalar decode_scalar(std::span<const std::uint8_t> in, std::size_t& offset);
Vector decode_vector(std::span<const std::uint8_t> in, std::size_t& offset);
Scalar decode_scalar(std::span<const std::uint8_t> in);

}  // namespace gauth::exactmath
