#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "critfiber/types.hpp"

namespace critfiber {

struct SolutionPoint {
    VectorXc z;
    double residual = 0.0;
};

/// Componentwise relative max-distance: max_i |a_i - b_i| / max(1, |a_i|, |b_i|).
/// Multipliers can be large, so an absolute norm would split one point in two.
double point_distance(const VectorXc& a, const VectorXc& b);

/// Deduplicated set of solution vectors under point_distance.
///
/// Distinct stored points are always more than dedup_tol apart. Insertion
/// order is preserved.
class SolutionSet {
  public:
    explicit SolutionSet(double dedup_tol = 1e-6) : dedup_tol_(dedup_tol) {}

    double dedup_tol() const { return dedup_tol_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const std::vector<SolutionPoint>& points() const { return points_; }
    const SolutionPoint& operator[](std::size_t i) const { return points_[i]; }
    auto begin() const { return points_.begin(); }
    auto end() const { return points_.end(); }

    /// Index of the closest stored point within tol (default dedup_tol).
    std::optional<std::size_t> find(const VectorXc& z, std::optional<double> tol = std::nullopt) const;
    bool contains(const VectorXc& z) const { return find(z).has_value(); }

    /// Adds z unless a stored point is within dedup_tol; returns true when added.
    bool insert(VectorXc z, double residual);

    /// Unconditional append; callers guarantee separation.
    void push_back_unchecked(VectorXc z, double residual);

    void erase(std::size_t index);

    std::vector<VectorXc> vectors() const;

    /// True when both sets have the same size and every point of one has a
    /// partner in the other within tol.
    bool same_points(const SolutionSet& other, double tol) const;

  private:
    double dedup_tol_;
    std::vector<SolutionPoint> points_;
};

}  // namespace critfiber
