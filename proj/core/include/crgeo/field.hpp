#pragma once

#include <memory>
#include <utility>

#include "crgeo/linalg.hpp"

namespace crgeo {

template <class T> using ScalarOut = T;
template <class T> using VecOut = Vec<T>;
template <class T> using CVecOut = CVec<T>;
template <class T> using MatOut = Mat<T>;

// A pure evaluator on chart points, callable at every scalar of the dual tower.
// Construct from a generic lambda taking `const Vec<T>&`.
template <template <class> class R>
class Field {
    struct Concept {
        virtual ~Concept() = default;
#define CRGEO_FIELD_EVAL(T) virtual R<T> eval(const Vec<T>& x) const = 0;
        CRGEO_SCALAR_TOWER(CRGEO_FIELD_EVAL)
#undef CRGEO_FIELD_EVAL
    };

    template <class F>
    struct Model final : Concept {
        F f;
        explicit Model(F fn) : f(std::move(fn)) {}
#define CRGEO_FIELD_EVAL(T) R<T> eval(const Vec<T>& x) const override { return f(x); }
        CRGEO_SCALAR_TOWER(CRGEO_FIELD_EVAL)
#undef CRGEO_FIELD_EVAL
    };

    std::shared_ptr<const Concept> impl_;

public:
    Field() = default;
    template <class F, class = std::enable_if_t<!std::is_same_v<std::decay_t<F>, Field>>>
    Field(F fn) : impl_(std::make_shared<Model<std::decay_t<F>>>(std::move(fn))) {}

    template <class T>
    R<T> operator()(const Vec<T>& x) const { return impl_->eval(x); }

    explicit operator bool() const { return static_cast<bool>(impl_); }
};

using ScalarField = Field<ScalarOut>;
using VectorField = Field<VecOut>;
using ComplexVectorField = Field<CVecOut>;
using OneFormField = Field<VecOut>;        // covector components in coordinates
using MatrixField = Field<MatOut>;         // endomorphism J^i_j, or bilinear-form components
using TwoFormField = Field<MatOut>;        // omega(d_i, d_j)
using EndomorphismField = Field<MatOut>;

}  // namespace crgeo
