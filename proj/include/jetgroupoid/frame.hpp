#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <jetgroupoid/errors.hpp>
#include <jetgroupoid/field.hpp>
#include <jetgroupoid/linalg.hpp>
#include <jetgroupoid/series.hpp>

namespace jetgroupoid
{

template <Field K>
using Point = std::vector<typename K::value_type>;

template <Field K>
bool points_equal(const K &field, const Point<K> &a, const Point<K> &b)
{
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!field.equal(a[i], b[i])) {
            return false;
        }
    }
    return true;
}

namespace detail
{

template <Field K>
void require_tuple_shape(const SeriesTuple<K> &t, const char *what)
{
    if (t.empty()) {
        return;
    }
    for (const auto &s : t) {
        require_compatible(s, t[0]);
    }
    if (t[0].variables() != t.size()) {
        throw ShapeMismatch(std::string(what) + ": expected as many components as source variables");
    }
}

template <Field K>
void require_invertible(const SeriesTuple<K> &t, const char *what)
{
    if (t.empty()) {
        return;
    }
    if (t[0].order() == 0) {
        throw ShapeMismatch(std::string(what) + ": order-0 jets carry no linear part");
    }
    if (t[0].field().is_zero(determinant(t[0].field(), linear_part(t)))) {
        throw SingularLinearPart(std::string(what) + ": linear part is singular");
    }
}

} // namespace detail

// Order-k frame on a fiber of M -> B: a base point b and the jet at 0 of a
// local isomorphism eps -> (x_1(eps), ..., x_q(eps)) into the fiber over b.
template <Field K>
class FrameJet
{
public:
    FrameJet(Point<K> base, SeriesTuple<K> components) : base_(std::move(base)), components_(std::move(components))
    {
        detail::require_tuple_shape(components_, "frame");
        detail::require_invertible(components_, "frame");
    }

    // The affine frame eps -> fiber_point + eps.
    static FrameJet standard(const K &field, Point<K> base, const Point<K> &fiber_point, unsigned k)
    {
        const auto q = static_cast<unsigned>(fiber_point.size());
        auto comps = identity_tuple(field, q, k);
        for (unsigned i = 0; i < q; ++i) {
            comps[i][0] = fiber_point[i];
        }
        return FrameJet(std::move(base), std::move(comps));
    }

    [[nodiscard]] const Point<K> &base() const noexcept
    {
        return base_;
    }
    [[nodiscard]] const SeriesTuple<K> &components() const noexcept
    {
        return components_;
    }
    [[nodiscard]] unsigned fiber_dimension() const noexcept
    {
        return static_cast<unsigned>(components_.size());
    }
    [[nodiscard]] unsigned order() const
    {
        return components_.at(0).order();
    }
    [[nodiscard]] const K &field() const
    {
        return components_.at(0).field();
    }

    // r(0), the point of the fiber the frame is attached to.
    [[nodiscard]] Point<K> fiber_point() const
    {
        Point<K> p;
        for (const auto &c : components_) {
            p.push_back(c.constant_term());
        }
        return p;
    }

    // Components with their constant terms removed.
    [[nodiscard]] SeriesTuple<K> centered() const
    {
        auto out = components_;
        for (auto &c : out) {
            c[0] = c.field().zero();
        }
        return out;
    }

    friend bool operator==(const FrameJet &a, const FrameJet &b)
    {
        return a.components_ == b.components_ && points_equal(a.field(), a.base_, b.base_);
    }

private:
    Point<K> base_;
    SeriesTuple<K> components_;
};

// Element of Gamma_k: jet of an origin-preserving invertible self-map of (C^q, 0).
template <Field K>
class SourceJet
{
public:
    explicit SourceJet(SeriesTuple<K> components) : components_(std::move(components))
    {
        detail::require_tuple_shape(components_, "source jet");
        for (const auto &c : components_) {
            if (!c.field().is_zero(c.constant_term())) {
                throw NonPointedInner("source jet must fix the origin");
            }
        }
        detail::require_invertible(components_, "source jet");
    }

    static SourceJet identity(const K &field, unsigned q, unsigned k)
    {
        return SourceJet(identity_tuple(field, q, k));
    }

    [[nodiscard]] const SeriesTuple<K> &components() const noexcept
    {
        return components_;
    }

    // Group law of Gamma_k: (this o other)(eps) = this(other(eps)).
    [[nodiscard]] SourceJet after(const SourceJet &other) const
    {
        return SourceJet(compose(components_, other.components_));
    }

    [[nodiscard]] SourceJet inverse() const
    {
        return SourceJet(tuple_invert(components_));
    }

    friend bool operator==(const SourceJet &a, const SourceJet &b)
    {
        return a.components_ == b.components_;
    }

private:
    SeriesTuple<K> components_;
};

// Right action of Gamma_k on frames: r -> r o gamma.
template <Field K>
FrameJet<K> frame_compose_gamma(const FrameJet<K> &r, const SourceJet<K> &gamma)
{
    if (gamma.components().size() != r.fiber_dimension()) {
        throw ShapeMismatch("source jet and frame have different fiber dimensions");
    }
    return FrameJet<K>(r.base(), compose(r.components(), gamma.components()));
}

// Element of Aut_k(M/B): the k-jet of an invertible map from the fiber over
// source_base at source_fiber to the fiber over target_base. Components are
// written in centered source coordinates u = x - source_fiber; their constant
// terms form the target fiber point.
template <Field K>
class MapJet
{
public:
    MapJet(Point<K> source_base, Point<K> source_fiber, Point<K> target_base, SeriesTuple<K> components)
        : source_base_(std::move(source_base)), source_fiber_(std::move(source_fiber)),
          target_base_(std::move(target_base)), components_(std::move(components))
    {
        detail::require_tuple_shape(components_, "map jet");
        if (source_fiber_.size() != components_.size()) {
            throw ShapeMismatch("map jet source fiber point has wrong dimension");
        }
        if (source_base_.size() != target_base_.size()) {
            throw ShapeMismatch("map jet source and target base dimensions differ");
        }
        detail::require_invertible(components_, "map jet");
    }

    static MapJet identity(const K &field, const Point<K> &base, const Point<K> &fiber_point, unsigned k)
    {
        const auto q = static_cast<unsigned>(fiber_point.size());
        auto comps = identity_tuple(field, q, k);
        for (unsigned i = 0; i < q; ++i) {
            comps[i][0] = fiber_point[i];
        }
        return MapJet(base, fiber_point, base, std::move(comps));
    }

    [[nodiscard]] const Point<K> &source_base() const noexcept
    {
        return source_base_;
    }
    [[nodiscard]] const Point<K> &source_fiber() const noexcept
    {
        return source_fiber_;
    }
    [[nodiscard]] const Point<K> &target_base() const noexcept
    {
        return target_base_;
    }
    [[nodiscard]] const SeriesTuple<K> &components() const noexcept
    {
        return components_;
    }
    [[nodiscard]] const K &field() const
    {
        return components_.at(0).field();
    }
    [[nodiscard]] unsigned order() const
    {
        return components_.at(0).order();
    }
    [[nodiscard]] Point<K> target_fiber() const
    {
        Point<K> p;
        for (const auto &c : components_) {
            p.push_back(c.constant_term());
        }
        return p;
    }

    // Jacobian of the map at the source point.
    [[nodiscard]] Matrix<K> linear_part() const
    {
        return jetgroupoid::linear_part(components_);
    }

    // Coordinate vector: source base, source fiber, target base, then for
    // each component its jet coordinates r^alpha in graded-lex order.
    [[nodiscard]] std::vector<typename K::value_type> flatten() const
    {
        std::vector<typename K::value_type> v;
        v.insert(v.end(), source_base_.begin(), source_base_.end());
        v.insert(v.end(), source_fiber_.begin(), source_fiber_.end());
        v.insert(v.end(), target_base_.begin(), target_base_.end());
        for (const auto &c : components_) {
            for (const auto &alpha : c.layout().indices()) {
                v.push_back(c.jet_coordinate(alpha));
            }
        }
        return v;
    }

    // Groupoid law: (*this) after `first`, defined when first's target is
    // this jet's source.
    [[nodiscard]] MapJet after(const MapJet &first) const
    {
        const auto &field = this->field();
        if (!points_equal(field, first.target_base_, source_base_)
            || !points_equal(field, first.target_fiber(), source_fiber_)) {
            throw ShapeMismatch("map jets are not composable: target of the first is not the source of the second");
        }
        auto inner = first.components_;
        for (std::size_t i = 0; i < inner.size(); ++i) {
            inner[i][0] = field.zero();
        }
        return MapJet(first.source_base_, first.source_fiber_, target_base_, compose(components_, inner));
    }

    [[nodiscard]] MapJet inverse() const
    {
        auto centered = components_;
        for (auto &c : centered) {
            c[0] = c.field().zero();
        }
        auto inv = tuple_invert(centered);
        for (std::size_t i = 0; i < inv.size(); ++i) {
            inv[i][0] = source_fiber_[i];
        }
        return MapJet(target_base_, target_fiber(), source_base_, std::move(inv));
    }

    friend bool operator==(const MapJet &a, const MapJet &b)
    {
        const auto &f = a.field();
        return points_equal(f, a.source_base_, b.source_base_) && points_equal(f, a.source_fiber_, b.source_fiber_)
               && points_equal(f, a.target_base_, b.target_base_) && a.components_ == b.components_;
    }

private:
    Point<K> source_base_;
    Point<K> source_fiber_;
    Point<K> target_base_;
    SeriesTuple<K> components_;
};

// The class of (r, s) under the diagonal Gamma_k action, i.e. r o s^{-1},
// as a jet from (base of s, s(0)) to (base of r, r(0)).
template <Field K>
MapJet<K> map_jet_from_pair(const FrameJet<K> &r, const FrameJet<K> &s)
{
    require_same_field(r.field(), s.field());
    if (r.order() != s.order() || r.fiber_dimension() != s.fiber_dimension()) {
        throw ShapeMismatch("frames differ in order or fiber dimension");
    }
    if (r.base().size() != s.base().size()) {
        throw ShapeMismatch("frames live over bases of different dimension");
    }
    const auto s_inv = tuple_invert(s.centered());
    return MapJet<K>(s.base(), s.fiber_point(), r.base(), compose(r.components(), s_inv));
}

} // namespace jetgroupoid
