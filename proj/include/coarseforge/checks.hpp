#pragma once

#include "coarseforge/certificate.hpp"
#include "coarseforge/control.hpp"
#include "coarseforge/map_table.hpp"

namespace coarseforge {

/// d_dst(fx, fx') <= rho(d_src(x, x')) on all window pairs with finite source
/// distance; the extended-metric convention (d_dst infinite forces d_src
/// infinite) is part of the check. Fail reports the worst pair.
Certificate check_upper_control(const MapTable& f, const ControlFn& rho);

/// d_dst(fx, fx') >= rho(d_src(x, x')) plus the dual convention
/// (d_src infinite forces d_dst infinite).
Certificate check_lower_control(const MapTable& f, const ControlFn& rho_lower);

/// max_x d(fx, gx) <= kappa; reports the exact maximum.
Certificate check_closeness(const MapTable& f, const MapTable& g, const Rational& kappa);

/// every target-window point within r of the image; reports the exact
/// covering radius.
Certificate check_coarse_surjectivity(const MapTable& f, const Rational& r,
                                      const std::vector<Point>& target_window);

struct QuasiIsometryData {
    Certificate certificate;
    AffineFit upper;       // d_dst <= upper(d_src)
    AffineFit lower_rho;   // d_src <= lower_rho(d_dst); its inverse_T is the lower control
    ExtDist covering_radius = ExtDist::inf();
};

/// Fits affine controls on the inner window (margin_percent of the
/// eccentricity spread shaved, both sides) and the covering radius against the
/// inner target window; pass iff all constants are finite and no collapse pair
/// (d_dst = 0 < d_src) exists.
QuasiIsometryData certify_quasi_isometry(const MapTable& f, int margin_percent);

/// Explicit-matrix space with d'(x,x') = max(1, d_dst(fx, fx')) off the
/// diagonal; the sandwich d' - 1 <= d_dst(fx,fx') <= d' is replayed exactly.
SpaceHandle coarse_pullback_metric(const MapTable& f);

struct PreorderOptions {
    Rational fit_fraction = 1;   // fit on the first fraction of the window (by order)
    long pair_budget = 10000;    // above this, pairs are stride-subsampled
    int poly_degree = 3;
};

/// The relation d_lo <= rho(d_hi) for some rho in cls, certified by fitting on
/// the fit sub-window and replaying on the full pair set. Both handles must
/// share one window.
Certificate metric_preorder_check(const SpaceHandle& d_hi, const SpaceHandle& d_lo,
                                  ControlClass cls, const PreorderOptions& opts = {});

struct ExtremalityEntry {
    std::string candidate;
    Certificate preorder;  // candidate <= rho(d_sigma)
};

struct ExtremalityReport {
    std::vector<ExtremalityEntry> entries;
    bool maximal = true;  // all candidates sit below d_sigma on this window
};

/// Window evidence that the Rips metric at scale sigma is preorder-greatest
/// among the given coarsely equivalent candidate metrics.
ExtremalityReport extremality_report(const SpaceHandle& d, const Rational& sigma,
                                     const std::vector<SpaceHandle>& candidates,
                                     ControlClass cls, const PreorderOptions& opts = {});

}  // namespace coarseforge
