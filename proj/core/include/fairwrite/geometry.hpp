#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "fairwrite/errors.hpp"

namespace fairwrite {

/// A fixed-dimension real vector. Every text handled by the pipeline (responses,
/// group descriptors, contextualized words) is represented by one of these.
///
/// Construction rejects empty input and non-finite components, so every
/// Embedding that exists satisfies dim() >= 1 and all-finite.
class Embedding {
 public:
  explicit Embedding(std::vector<double> components);
  Embedding(std::initializer_list<double> components);

  std::size_t dim() const noexcept { return components_.size(); }
  std::span<const double> values() const noexcept { return components_; }
  double operator[](std::size_t i) const { return components_[i]; }

  bool operator==(const Embedding&) const = default;

 private:
  std::vector<double> components_;
};

/// Default tolerance below which |cos| is considered too close to 1 for a
/// meaningful repair vector.
inline constexpr double kDefaultDegenerateDelta = 1e-6;

double dot(const Embedding& a, const Embedding& b);
double norm(const Embedding& v);

/// dot(a,b) / (|a| |b|), clamped to [-1, 1].
/// Throws InvalidArgument on dimension mismatch or zero norm.
double cosine(const Embedding& a, const Embedding& b);

/// Unit vector in the direction of v. Throws InvalidArgument if |v| == 0.
Embedding normalize(const Embedding& v);

Embedding add(const Embedding& a, const Embedding& b);
Embedding scale(const Embedding& v, double factor);

/// Repair vector for a response embedding and an unpleasant-word embedding:
///
///   v1 = v_r / |v_r|,  v2 = w / |w|,  u1 = cos(v_r, w) v2 - v1,
///   u* = u1 / |u1| - v1
///
/// so that <u* + v1, v2> = 0. Throws DegenerateRepair when
/// |cos(v_r, w)| > 1 - delta, where u1 vanishes.
Embedding repair_vector(const Embedding& response, const Embedding& unpleasant,
                        double delta = kDefaultDegenerateDelta);

/// Index of the candidate most cosine-similar to `query`; ties go to the
/// lowest index. `project` maps an element of `items` to its Embedding.
template <typename Range, typename Projection>
std::size_t nearest_by(const Embedding& query, const Range& items, Projection project) {
  std::size_t best = 0;
  double best_similarity = 0.0;
  std::size_t index = 0;
  for (const auto& item : items) {
    const double similarity = cosine(query, project(item));
    if (index == 0 || similarity > best_similarity) {
      best = index;
      best_similarity = similarity;
    }
    ++index;
  }
  if (index == 0) {
    throw InvalidArgument("nearest: empty candidate list");
  }
  return best;
}

std::size_t nearest(const Embedding& query, std::span<const Embedding> candidates);

}  // namespace fairwrite
