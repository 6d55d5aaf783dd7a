#include "fairwrite/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fairwrite {

namespace {

void check_same_dim(const Embedding& a, const Embedding& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw InvalidArgument(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                          " vs " + std::to_string(b.dim()) + ")");
  }
}

// Accumulates in long double; the result is rounded once.
long double dot_wide(std::span<const double> a, std::span<const double> b) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += static_cast<long double>(a[i]) * static_cast<long double>(b[i]);
  }
  return sum;
}

long double norm_wide(std::span<const double> v) { return std::sqrt(dot_wide(v, v)); }

}  // namespace

Embedding::Embedding(std::vector<double> components) : components_(std::move(components)) {
  if (components_.empty()) {
    throw InvalidArgument("embedding must have at least one component");
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (!std::isfinite(components_[i])) {
      throw InvalidArgument("embedding component " + std::to_string(i) + " is not finite");
    }
  }
}

Embedding::Embedding(std::initializer_list<double> components)
    : Embedding(std::vector<double>(components)) {}

double dot(const Embedding& a, const Embedding& b) {
  check_same_dim(a, b, "dot");
  return static_cast<double>(dot_wide(a.values(), b.values()));
}

double norm(const Embedding& v) { return static_cast<double>(norm_wide(v.values())); }

double cosine(const Embedding& a, const Embedding& b) {
  check_same_dim(a, b, "cosine");
  const long double na = norm_wide(a.values());
  const long double nb = norm_wide(b.values());
  if (na == 0.0L || nb == 0.0L) {
    throw InvalidArgument("cosine: zero-norm input");
  }
  const long double c = dot_wide(a.values(), b.values()) / (na * nb);
  return std::clamp(static_cast<double>(c), -1.0, 1.0);
}

Embedding normalize(const Embedding& v) {
  const long double n = norm_wide(v.values());
  if (n == 0.0L) {
    throw InvalidArgument("normalize: zero-norm input");
  }
  std::vector<double> out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) {
    out[i] = static_cast<double>(v[i] / n);
  }
  return Embedding(std::move(out));
}

Embedding add(const Embedding& a, const Embedding& b) {
  check_same_dim(a, b, "add");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    out[i] = a[i] + b[i];
  }
  return Embedding(std::move(out));
}

Embedding scale(const Embedding& v, double factor) {
  std::vector<double> out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) {
    out[i] = v[i] * factor;
  }
  return Embedding(std::move(out));
}

Embedding repair_vector(const Embedding& response, const Embedding& unpleasant, double delta) {
  check_same_dim(response, unpleasant, "repair_vector");
  const double similarity = cosine(response, unpleasant);
  if (std::abs(similarity) > 1.0 - delta) {
    throw DegenerateRepair("repair_vector: |cos| = " + std::to_string(std::abs(similarity)) +
                           " is within " + std::to_string(delta) + " of 1; no repair possible");
  }
  const Embedding v1 = normalize(response);
  const Embedding v2 = normalize(unpleasant);

  std::vector<double> u1(v1.dim());
  for (std::size_t i = 0; i < u1.size(); ++i) {
    u1[i] = similarity * v2[i] - v1[i];
  }
  const long double u1_norm = norm_wide(u1);
  if (u1_norm == 0.0L) {
    throw DegenerateRepair("repair_vector: rejection component vanished");
  }

  std::vector<double> out(v1.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(u1[i] / u1_norm) - v1[i];
  }
  return Embedding(std::move(out));
}

std::size_t nearest(const Embedding& query, std::span<const Embedding> candidates) {
  return nearest_by(query, candidates, [](const Embedding& e) -> const Embedding& { return e; });
}

}  // namespace fairwrite
