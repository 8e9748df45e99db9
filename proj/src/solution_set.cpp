#include "critfiber/solution_set.hpp"

#include "critfiber/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace critfiber {

double point_distance(const VectorXc& a, const VectorXc& b) {
    if (a.size() != b.size()) throw DimensionError("point_distance: size mismatch");
    double d = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double scale = std::max({1.0, std::abs(a(i)), std::abs(b(i))});
        d = std::max(d, std::abs(a(i) - b(i)) / scale);
    }
    return d;
}

std::optional<std::size_t> SolutionSet::find(const VectorXc& z, std::optional<double> tol) const {
    const double limit = tol.value_or(dedup_tol_);
    std::optional<std::size_t> best;
    double best_distance = limit;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].z.size() != z.size()) continue;
        const double d = point_distance(points_[i].z, z);
        if (d <= best_distance) {
            best_distance = d;
            best = i;
        }
    }
    return best;
}

bool SolutionSet::insert(VectorXc z, double residual) {
    if (find(z)) return false;
    points_.push_back({std::move(z), residual});
    return true;
}

void SolutionSet::push_back_unchecked(VectorXc z, double residual) { points_.push_back({std::move(z), residual}); }

void SolutionSet::erase(std::size_t index) {
    if (index >= points_.size()) throw std::out_of_range("solution index out of range");
    points_.erase(points_.begin() + static_cast<std::ptrdiff_t>(index));
}

std::vector<VectorXc> SolutionSet::vectors() const {
    std::vector<VectorXc> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.z);
    return out;
}

bool SolutionSet::same_points(const SolutionSet& other, double tol) const {
    if (size() != other.size()) return false;
    for (const auto& p : points_) {
        if (!other.find(p.z, tol)) return false;
    }
    for (const auto& p : other.points_) {
        if (!find(p.z, tol)) return false;
    }
    return true;
}

}  // namespace critfiber
