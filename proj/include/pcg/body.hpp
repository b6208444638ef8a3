#pragma once

#include "pcg/linear_map.hpp"
#include "pcg/types.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pcg {

class Body;

namespace shape {

/// The l_p ball {x : (sum |x_i|^p)^{1/p} <= radius}, 0 < p <= 1.
struct StandardBall {
    double p;
    int n;
    double radius;
};

struct EuclideanBall {
    int n;
    double radius;
};

/// {x : x^T A x <= 1} with A symmetric positive definite.
struct Ellipsoid {
    Matrix shape;
};

struct Box {
    Vector half_widths;
};

/// p-convex hull of a symmetric generator list. Generators are stored as
/// consecutive pairs (g_k, -g_k), so generators[2k] is the k-th representative.
struct PConvHull {
    std::vector<Vector> generators;
    double p;
};

/// Intersection of symmetric slabs {y : |<a_i, y>| <= 1}.
struct Polytope {
    std::vector<Vector> normals;
};

/// p-convex hull of the unit sphere minus the two open geodesic caps of
/// angular radius eps around +-e_n.
struct CapBody {
    int n;
    double eps;
    double p;
};

/// Polar of CapBody: {y : <x, y> <= 1 for all x on the sphere outside the caps}.
struct CapPolar {
    int n;
    double eps;
};

struct Transformed {
    LinearMap map;
    std::shared_ptr<const Body> inner;
};

}  // namespace shape

using Shape = std::variant<shape::StandardBall, shape::EuclideanBall, shape::Ellipsoid, shape::Box,
                           shape::PConvHull, shape::Polytope, shape::CapBody, shape::CapPolar,
                           shape::Transformed>;

/// Finite symmetric description: body = p-conv{+-reps}.
struct GeneratorForm {
    std::vector<Vector> reps;
    double p = 1.0;
};

namespace detail {
class SubsetSolver;
struct BodyData;
}  // namespace detail

/// Immutable symmetric star body with 0 in its interior. Copies share state.
class Body {
public:
    static Body standard_ball(double p, int n, double radius = 1.0);
    static Body euclidean_ball(int n, double radius = 1.0);
    static Body ellipsoid(Matrix shape);
    static Body box(Vector half_widths);
    /// Generators are deduplicated and symmetrized; they must span R^n.
    static Body pconv_hull(const std::vector<Vector>& generators, double p);
    static Body polytope(const std::vector<Vector>& normals);
    static Body cap_body(int n, double eps, double p);
    static Body cap_polar(int n, double eps);
    /// Structural transform; see transformed() in bodies.hpp for the simplifying version.
    static Body transformed(const LinearMap& map, const Body& inner);

    int dim() const;
    const Shape& shape() const;
    template <class T>
    const T* as() const {
        return std::get_if<T>(&shape());
    }

    /// Finite generator description when the body is (a linear image of) a
    /// generated body; nullptr otherwise.
    const GeneratorForm* generator_form() const;
    bool is_convex() const;
    /// p of the construction (1 for convex variants).
    double p() const;
    /// Upper bound on max |x|_2 over the body.
    double outer_radius() const;

    std::string describe() const;

    const detail::BodyData& data() const { return *data_; }

private:
    explicit Body(std::shared_ptr<const detail::BodyData> data) : data_(std::move(data)) {}
    std::shared_ptr<const detail::BodyData> data_;
};

namespace detail {

/// Enumerates every linearly independent n-subset of a representative list and
/// keeps the inverse of each subset matrix, so that basic solutions of
/// G lambda = x are one mat-vec each.
class SubsetSolver {
public:
    SubsetSolver(const std::vector<Vector>& reps, int n);

    struct Result {
        double cost_p = 0.0;  // min over basic solutions of sum |lambda|^p
        double cost_1 = 0.0;  // min over basic solutions of sum |lambda|
        std::vector<int> support;
        Vector coefficients;  // signed, aligned with support; for the cost_p minimizer
    };

    /// The minimum of a concave separable cost over {lambda : G lambda = x} is attained
    /// at a basic solution, so this is exact for every 0 < p <= 1.
    Result solve(const Vector& x, double p, bool want_coefficients) const;

    std::size_t subset_count() const { return count_; }
    int dim() const { return n_; }

private:
    int n_ = 0;
    std::size_t count_ = 0;
    bool precomputed_ = false;
    std::vector<int> indices_;     // count_ * n_
    std::vector<double> inverse_;  // count_ * n_ * n_, row-major
    std::vector<Vector> reps_;
};

struct BodyData {
    Shape shape;
    int dim = 0;
    double p = 1.0;
    bool convex = true;
    double outer_radius = 0.0;
    std::optional<GeneratorForm> generators;
    std::shared_ptr<const SubsetSolver> solver;       // gauge of a PConvHull
    std::shared_ptr<const SubsetSolver> dual_solver;  // support function of a Polytope
    Matrix ellipsoid_inverse;                         // A^{-1} for Ellipsoid
};

}  // namespace detail

}  // namespace pcg
