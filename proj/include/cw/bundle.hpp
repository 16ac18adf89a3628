#pragma once

#include "cw/geometry.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace cw {

enum class FieldKind { Real, Complex };

class VectorBundle;

struct LocalFrame {
    const VectorBundle* bundle = nullptr;
    std::string name;
    std::string domain;
    /// set for tangent-bundle frames so connection forms know their coframe
    const CoframeDef* coframe = nullptr;
};

/// Links two frames on their overlap: components transform by c2 = g * c1
/// and the frames satisfy e1_i = sum_j g[j][i] e2_j.
struct FrameChange {
    const LocalFrame* from = nullptr;
    const LocalFrame* to = nullptr;
    std::map<const Chart*, ExprMat> g;
    std::string overlap;

    ExprMat matrix_on(const Chart& chart) const;
    Expr det_on(const Chart& chart) const;
};

class VectorBundle {
public:
    VectorBundle(Manifold* base, int rank, FieldKind field, std::string name);
    VectorBundle(const VectorBundle&) = delete;
    VectorBundle& operator=(const VectorBundle&) = delete;

    /// Tangent bundle: one frame per chart plus one per registered abstract
    /// coframe, with the chart-frame links installed.
    static std::unique_ptr<VectorBundle> tangent(Manifold& base);

    Manifold* base() const { return base_; }
    int rank() const { return rank_; }
    FieldKind field() const { return field_; }
    const std::string& name() const { return name_; }

    LocalFrame& add_frame(const std::string& name, const std::string& domain,
                          const CoframeDef* coframe = nullptr);
    const LocalFrame* frame(const std::string& name) const;
    std::vector<const LocalFrame*> frames() const;

    /// Registers g and its inverse; throws on a canonically singular matrix.
    const FrameChange& set_frame_change(const LocalFrame& f1, const LocalFrame& f2,
                                        const std::map<const Chart*, ExprMat>& g);
    const FrameChange* frame_change(const LocalFrame& from, const LocalFrame& to) const;

private:
    Manifold* base_;
    int rank_;
    FieldKind field_;
    std::string name_;
    std::vector<std::unique_ptr<LocalFrame>> frames_;
    std::vector<std::unique_ptr<FrameChange>> changes_;
};

/// Section with per-frame component vectors of scalar fields.
class Section {
public:
    Section() = default;
    Section(const VectorBundle* bundle, std::string name)
        : bundle_(bundle), name_(std::move(name)) {}

    const VectorBundle* bundle() const { return bundle_; }
    const std::string& name() const { return name_; }

    void set_comp(const LocalFrame& frame, const Chart& chart, int i, Expr value);
    bool has_frame(const LocalFrame& frame) const { return comps_.count(&frame) != 0; }
    const std::vector<ScalarField>& comps(const LocalFrame& frame) const;
    std::vector<const LocalFrame*> frames() const;

private:
    const VectorBundle* bundle_ = nullptr;
    std::string name_;
    std::map<const LocalFrame*, std::vector<ScalarField>> comps_;

    friend Section continue_section(const Section& s, const LocalFrame& frame,
                                    const std::string& overlap);
    friend Section section_add(const Section& a, const Section& b);
};

struct FiberVector {
    const VectorBundle* bundle = nullptr;
    Point point;
    const LocalFrame* frame = nullptr;
    std::vector<Expr> comps;
};

/// Components of s in the target frame, re-expressed through the chart
/// transitions; throws when no frame change is registered.
std::vector<ScalarField> section_change_frame(const Section& s, const LocalFrame& target);

/// Extends s beyond the overlap by adopting the converted components on the
/// frame's whole domain (canonical well-definedness, no pointwise check).
Section continue_section(const Section& s, const LocalFrame& frame, const std::string& overlap);

FiberVector section_at(const Section& s, const Point& p, const LocalFrame& frame);

Section section_add(const Section& a, const Section& b);
Section section_scale(const ScalarField& f, const Section& s);

} // namespace cw
