#include "cle/explorer.hpp"

#include "cle/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <cstdio>
#include <cstdlib>

namespace cle {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Frame change sending the primary target to i and the current driving value
// to 0. Rounds started from this state are independent renewals, which is
// what makes round counts geometric.
Moebius renormalize_at(std::complex<double> zeta, double root) {
    Moebius a = Moebius::affine_to_i(zeta);
    double image = a(std::complex<double>(root, 0.0)).real();
    return Moebius::rotation_about_i(-2.0 * std::atan(image)).compose(a);
}

// One round's worth of driver data, extendable in place. Marks are rebuilt
// from a fresh copy of the same stream on every extension, which leaves the
// already-built prefix of the driver bit-identical.
struct RoundDriver {
    BesselPath path;
    DrivenPath drv;
    Rng path_rng;
    Rng marks_base;

    RoundDriver(const ExploreParams& p, Rng path_stream, Rng marks_stream)
        : path_rng(path_stream), marks_base(marks_stream) {
        double delta = delta_from_kappa(p.kappa);
        path = simulate_squared_bessel(delta, p.dt, 0.0, p.chunk_capacity, path_rng);
        rebuild(p);
    }

    void extend(const ExploreParams& p) {
        extend_squared_bessel(path, p.chunk_capacity, path_rng);
        rebuild(p);
    }

    void rebuild(const ExploreParams& p) {
        Rng mrng = marks_base;
        auto marks = excursion_marks(decompose_excursions(path).size(), mrng);
        if (p.family == DriverFamily::Mu)
            drv = build_mu_driver(path, marks, p.r, p.mu);
        else
            drv = build_beta_driver(path, marks, p.kappa, p.r, p.beta, p.c_value);
    }
};

struct LiveTarget {
    std::size_t index;            // position in the caller's target list
    TrackedPoint pt;              // image under the full composed chain
    std::complex<double> z_start; // position in the current round's start frame
    std::complex<double> z_span;  // image when the current excursion began
    bool lost = false;            // numerically dead without a confirmed capture
    // Image height at the last rejected capture check. A rejection means the
    // throat was still open; mid-excursion re-tests fire only when the image
    // height has halved since, so points parked near the axis stop burning
    // winding tests while a pocket sealing around them still announces
    // itself through the collapse of their image.
    double reject_im = std::numeric_limits<double>::quiet_NaN();
    // Span identity of the last completed check, so the mandatory seal test
    // at an excursion's end is not repeated when a cascade test already ran
    // at the final step.
    std::size_t checked_begin = static_cast<std::size_t>(-1);
    std::size_t checked_end = 0;
};

// Driver prefix, walked excursion spans, and closing frame change of a
// finished round, kept only when polylines are requested so later loops can
// be pulled back to the caller's coordinates.
struct RoundRecord {
    std::vector<double> w;
    std::vector<std::pair<std::size_t, std::size_t>> spans; // [begin, end) walked
    Moebius m; // identity until the renormalization at the round's end
    double dt = 0.0;
};

// Inverts the slit steps a round actually applied: only excursion spans are
// walked forward (zero runs carry no capacity), so only steps below k inside
// the spans may be inverted, in reverse order.
std::complex<double> invert_spans(std::complex<double> p, const std::vector<double>& w, double dt,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& spans,
                                  std::size_t k) {
    for (std::size_t s = spans.size(); s-- > 0;) {
        std::size_t lo = spans[s].first;
        std::size_t hi = std::min(k, spans[s].second);
        for (std::size_t j = hi; j > lo; --j) p = slit_step_inverse(p, w[j - 1], dt);
    }
    return p;
}

std::complex<double> pull_back(std::complex<double> p, const std::vector<RoundRecord>& records) {
    for (std::size_t j = records.size(); j-- > 0;) {
        const RoundRecord& rec = records[j];
        p = rec.m.inverse()(p);
        p = invert_spans(p, rec.w, rec.dt, rec.spans, rec.w.size());
    }
    return p;
}

double point_segment_distance(std::complex<double> p, std::complex<double> a,
                              std::complex<double> b) {
    std::complex<double> ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

// Preimage of the boundary point (x, 0) under one excursion's slit steps,
// in the frame where the excursion began. The hull a sealed excursion grows
// is an arch: it rises from the axis and closes back onto the axis where the
// drift has carried the driver, enclosing the region between itself and the
// axis. Its outer side is exactly the preimage of an interval of the axis
// around the final driving value, and x outside that interval comes back to
// the axis. Walking backward from an axis point never crosses the pinched
// throat at the seal, so this stays accurate where tracing the tip forward
// in time breaks down.
std::complex<double> arch_point(const std::vector<double>& w, std::size_t begin, std::size_t end,
                                double dt, double x) {
    std::complex<double> q(x, 0.0);
    for (std::size_t j = end; j > begin; --j) q = slit_step_inverse(q, w[j - 1], dt);
    return q;
}

struct Engine {
    ExploreParams p;
    CleSample out;
    std::vector<LiveTarget> live;
    std::vector<RoundRecord> records;
    CrTrajectory* traj = nullptr;
    double traj_cap = std::numeric_limits<double>::infinity();
    Rng base;
    std::uint64_t stream_counter = 0;
    double clock = 0.0;     // capacity time; zero runs of the driver excluded
    double last_root = 0.0; // driving value at the end of the last excursion
    double tol;   // image-height nomination threshold, see run_round()
    double guard; // numerical floor passed to TrackedPoint::advance

    Engine(const ExploreParams& params, const std::vector<std::complex<double>>& targets, Rng rng)
        : p(params), base(rng), tol(params.swallow_factor * std::sqrt(params.dt)),
          guard(1e-9 * std::sqrt(params.dt)) {
        if (p.family == DriverFamily::Mu && std::fabs(p.kappa - 4.0) > 1e-12)
            throw std::invalid_argument("explorer: mu family needs kappa = 4");
        if (!(p.renorm_height > 0.0) || !(p.renorm_height < 1.0))
            throw std::invalid_argument("explorer: renorm_height must be in (0, 1)");
        if (p.family == DriverFamily::Beta && p.beta != 0.0 && std::isnan(p.c_value))
            p.c_value = calibrated_c(p, base.substream(std::numeric_limits<std::uint64_t>::max()));
        out.targets = targets;
        out.outcomes.resize(targets.size());
        for (std::size_t j = 0; j < targets.size(); ++j) {
            if (!(targets[j].imag() > 0.0))
                throw std::invalid_argument("explorer: targets must have Im > 0");
            out.outcomes[j].target = targets[j];
            live.push_back(LiveTarget{j, TrackedPoint(targets[j]), targets[j], targets[j]});
        }
    }

    bool want_polyline() const { return p.polyline_points > 0; }

    void run() {
        while (!live.empty()) {
            if (out.rounds >= p.max_rounds) {
                out.ok = false;
                return;
            }
            ++out.rounds;
            run_round();
            if (traj && (traj->capture_time >= 0.0 || clock >= traj_cap)) return;
            if (live.empty()) return;
            Moebius m = renormalize_at(live.front().pt.z, last_root);
            for (LiveTarget& t : live) {
                std::complex<double> old = t.pt.z;
                t.pt.z = m(old);
                t.pt.dz *= m.deriv(old);
                t.z_start = t.pt.z;
                t.reject_im = std::numeric_limits<double>::quiet_NaN();
                t.checked_begin = static_cast<std::size_t>(-1);
                t.checked_end = 0;
            }
            if (want_polyline() && !records.empty()) records.back().m = m;
            out.renormalization_times.push_back(clock);
        }
    }

    // Runs excursions until one ends the round: a capture, the primary
    // target's image squeezed below the renormalization height, the
    // trajectory time cap, or the per-round capacity cap.
    void run_round() {
        std::uint64_t path_id = ++stream_counter;
        std::uint64_t marks_id = ++stream_counter;
        RoundDriver rd(p, base.substream(path_id), base.substream(marks_id));
        std::complex<double> dump_z0 = live.front().pt.z;
        auto dump_round = [&]() {
            if (!std::getenv("CLE_DEBUG_ROUNDDUMP")) return;
            char name[64];
            std::snprintf(name, sizeof name, "/tmp/round_%03d.txt", out.rounds);
            std::FILE* f = std::fopen(name, "w");
            std::fprintf(f, "%.17g %.17g %.17g\n", dump_z0.real(), dump_z0.imag(), rd.drv.dt);
            std::fprintf(f, "%zu\n", rd.drv.excursions.size());
            for (const auto& e : rd.drv.excursions)
                std::fprintf(f, "%zu %zu\n", e.begin, e.end);
            std::fprintf(f, "%zu\n", rd.drv.w.size());
            for (double v : rd.drv.w) std::fprintf(f, "%.17g\n", v);
            std::fclose(f);
        };
        dump_round();
        std::size_t exc_idx = 0;
        double round_clock = 0.0;
        double stop_height = live.front().pt.z.imag() * p.renorm_height;
        std::size_t front_id = live.front().index;
        last_root = 0.0; // every round's driver starts at the origin
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        while (true) {
            if (exc_idx >= rd.drv.excursions.size()) {
                if (rd.path.t(rd.path.steps()) >= p.round_capacity_cap) {
                    // The excursion straddling the end of the simulated path
                    // refuses to close (durations are heavy tailed, so this
                    // recurs); abandon the round rather than growing it.
                    ++out.capped_rounds;
                    finish_round_record(rd, spans);
                    return;
                }
                rd.extend(p);
                dump_round();
                continue;
            }
            const DriverExcursion exc = rd.drv.excursions[exc_idx];
            spans.emplace_back(exc.begin, exc.end);
            for (LiveTarget& t : live) t.z_span = t.pt.z;

            // A point is enclosed the moment a pocket of the growing curve
            // seals around it, which flattens its image onto the axis. A
            // pocket sealed mid-excursion has its footprint on the axis
            // squeezed exponentially by the remaining evolution, so its test
            // must run the moment it seals, while the winding polygon can
            // still resolve it; the collapse of the image height is that
            // moment's signature. Flat images also arise just outside the
            // hull, so flatness only nominates; the winding of the partial
            // arch decides. A rejection means the throat was still open, and
            // the candidate is re-tested each time its image height halves
            // (the floor stops the cascade for points squeezed from outside,
            // whose heights shrink forever without a seal), plus once more
            // when the excursion completes.
            auto flattened = [&](const TrackedPoint& pt) {
                return pt.swallowed || pt.z.imag() <= tol;
            };
            auto stop_round = [&](std::vector<std::size_t>& captured) {
                if (!captured.empty()) {
                    if (traj) {
                        traj->times.push_back(clock);
                        traj->cr.push_back(conformal_radius(live[captured.front()].pt));
                        for (std::size_t j : captured)
                            if (live[j].index == front_id) traj->capture_time = clock;
                    }
                    register_capture(rd, exc, spans, captured);
                }
                finish_round_record(rd, spans);
            };
            std::vector<std::size_t> bucket;
            for (std::size_t k = exc.begin; k < exc.end; ++k) {
                double xi = rd.drv.w[k];
                for (LiveTarget& t : live) {
                    if (t.pt.swallowed) continue;
                    t.pt.advance(xi, p.dt, guard);
                    // Squeezed to numerical death: resolved by the next test.
                    if (t.pt.z.imag() < 1e-100 || std::fabs(t.pt.dz.real()) > 1e150 ||
                        std::fabs(t.pt.dz.imag()) > 1e150)
                        t.pt.swallowed = true;
                }
                bucket.clear();
                for (std::size_t j = 0; j < live.size(); ++j) {
                    const LiveTarget& t = live[j];
                    if (!flattened(t.pt)) continue;
                    if (!t.pt.swallowed && !std::isnan(t.reject_im)) {
                        bool dropped =
                            t.pt.z.imag() < 0.5 * t.reject_im && t.pt.z.imag() > 1e-12;
                        if (!dropped) continue;
                    }
                    bucket.push_back(j);
                }
                if (bucket.empty()) continue;
                confirm_captures(rd, exc.begin, k + 1, bucket);
                if (!bucket.empty() || live.empty()) {
                    clock += static_cast<double>(k + 1 - exc.begin) * p.dt;
                    last_root = rd.drv.w[k + 1];
                    spans.back().second = k + 1;
                    stop_round(bucket);
                    return;
                }
            }
            round_clock += exc.duration;
            clock += exc.duration;
            last_root = rd.drv.w[exc.end];

            // Mandatory seal test: the completed arch is the authoritative
            // geometry, and a pocket's footprint is not yet squeezed at its
            // own seal, so candidates the cascade left untested (a wrap can
            // settle the image without halving it) are decided here.
            bucket.clear();
            for (std::size_t j = 0; j < live.size(); ++j) {
                const LiveTarget& t = live[j];
                if (!flattened(t.pt)) continue;
                if (t.checked_begin == exc.begin && t.checked_end == exc.end) continue;
                bucket.push_back(j);
            }
            if (!bucket.empty()) {
                confirm_captures(rd, exc.begin, exc.end, bucket);
                if (!bucket.empty() || live.empty()) {
                    stop_round(bucket);
                    return;
                }
            }

            if (traj) {
                traj->times.push_back(clock);
                traj->cr.push_back(conformal_radius(live.front().pt));
            }
            bool squeezed = live.front().pt.z.imag() < stop_height;
            if (squeezed || round_clock > p.round_capacity_cap || (traj && clock >= traj_cap)) {
                if (!squeezed && round_clock > p.round_capacity_cap) ++out.capped_rounds;
                finish_round_record(rd, spans);
                return;
            }
            ++exc_idx;
        }
    }

    // Winding of one excursion's arch around a point, computed in the frame
    // where the excursion began: the arch is sampled through arch_point and
    // the point is the image snapshot taken at the span's start. Winding is
    // preserved under the conformal change to any earlier frame, so this is
    // equivalent to testing in the round frame but costs only the excursion
    // itself. The polygon runs from the axis on one side of the arch to the
    // axis on the other, so the implicit closing chord of the winding sum
    // lies along the boundary and cannot cut the enclosed region. Samples
    // are refined only where they matter: a chord is split while it is long
    // relative to its distance from the point. Returns 0 with
    // *resolved = false when the point hugs the arch closer than the local
    // chord scale even after refinement.
    int winding_near(const std::vector<double>& w, std::size_t begin, std::size_t end,
                     std::complex<double> at, bool* resolved) const {
        double scale = std::sqrt(2.0 * static_cast<double>(end - begin) * p.dt);
        double floor_im = 1e-3 * scale;
        double ws = w[end - 1];
        auto sample = [&](double x) { return arch_point(w, begin, end, p.dt, x); };
        double xa = ws - 3.0 * scale, xb = ws + 3.0 * scale;
        for (int i = 0; i < 8 && sample(xa).imag() > floor_im; ++i) xa -= 3.0 * scale;
        for (int i = 0; i < 8 && sample(xb).imag() > floor_im; ++i) xb += 3.0 * scale;
        std::map<double, std::complex<double>> pts;
        int seeds = 32;
        for (int j = 0; j <= seeds; ++j) {
            double x = xa + (xb - xa) * j / seeds;
            pts.emplace(x, sample(x));
        }
        // priority: chord length over distance to the point, largest first
        auto ratio = [&](std::complex<double> a, std::complex<double> b) {
            double d = point_segment_distance(at, a, b);
            return std::abs(b - a) / std::max(d, 1e-300);
        };
        double min_dx = 1e-7 * (xb - xa);
        using Chord = std::pair<double, std::pair<double, double>>;
        std::priority_queue<Chord> queue;
        auto push_chord = [&](double x1, double x2) {
            if (x2 - x1 >= min_dx) queue.push({ratio(pts[x1], pts[x2]), {x1, x2}});
        };
        for (auto it = pts.begin(); std::next(it) != pts.end(); ++it)
            push_chord(it->first, std::next(it)->first);
        std::size_t budget = 1536;
        while (pts.size() < budget && !queue.empty() && queue.top().first > 0.5) {
            auto [r, seg] = queue.top();
            queue.pop();
            double mid = 0.5 * (seg.first + seg.second);
            pts.emplace(mid, sample(mid));
            push_chord(seg.first, mid);
            push_chord(mid, seg.second);
        }
        std::vector<std::complex<double>> poly;
        poly.reserve(pts.size());
        for (const auto& [x, z] : pts) poly.push_back(z);
        double best = std::numeric_limits<double>::infinity();
        double seg_local = 0.0;
        for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
            double d = point_segment_distance(at, poly[i], poly[i + 1]);
            if (d < best) {
                best = d;
                seg_local = std::abs(poly[i + 1] - poly[i]);
            }
        }
        *resolved = best >= 2.0 * seg_local;
        return winding_number(poly, at);
    }

    // Winnows flat candidates down to genuinely enclosed targets by the
    // winding of the sealing arch around them. Alive candidates that fail
    // the check stay in the walk with the rejection remembered; numerically
    // dead candidates that are provably outside can never be tracked
    // further, so they are dropped and the sample is invalidated.
    void confirm_captures(const RoundDriver& rd, std::size_t begin, std::size_t end,
                          std::vector<std::size_t>& bucket) {
        std::vector<std::size_t> confirmed_ids;
        for (std::size_t j : bucket) {
            LiveTarget& t = live[j];
            bool resolved = false;
            int wn = winding_near(rd.drv.w, begin, end, t.z_span, &resolved);
            t.checked_begin = begin;
            t.checked_end = end;
            if (std::getenv("CLE_DEBUG_CONFIRM"))
                std::fprintf(stderr,
                             "confirm r=%d span=[%zu,%zu) ws=%.4f zspan=(%.6g,%.6g) "
                             "zend=(%.6g,%.6g) wn=%d res=%d dead=%d\n",
                             out.rounds, begin, end, rd.drv.w[end - 1], t.z_span.real(),
                             t.z_span.imag(), t.pt.z.real(), t.pt.z.imag(), wn, (int)resolved,
                             (int)t.pt.swallowed);
            if (const char* dumpenv = std::getenv("CLE_DEBUG_DUMP")) {
                static bool dumped = false;
                if (!dumped && out.rounds == std::atoi(dumpenv)) {
                    dumped = true;
                    std::size_t exc_end = end;
                    for (const auto& e : rd.drv.excursions)
                        if (e.begin == begin) exc_end = e.end;
                    std::FILE* f = std::fopen("/tmp/dump_round.txt", "w");
                    std::fprintf(f, "%.17g %.17g %.17g\n", t.z_span.real(), t.z_span.imag(),
                                 rd.drv.dt);
                    for (std::size_t i = begin; i <= exc_end && i < rd.drv.w.size(); ++i)
                        std::fprintf(f, "%.17g\n", rd.drv.w[i]);
                    std::fclose(f);
                }
            }
            if (wn != 0) {
                confirmed_ids.push_back(t.index);
            } else if (t.pt.swallowed) {
                if (resolved) {
                    out.ok = false;
                    t.lost = true;
                } else {
                    // Dead on the arch's doorstep: cannot wait for the image
                    // to move, so take the flattening at its word.
                    ++out.ambiguous;
                    confirmed_ids.push_back(t.index);
                }
            } else {
                // An alive rejection is not a final call: the cascade and the
                // seal test revisit it, and permanently unresolvable points
                // end as doorstep captures or losses, which are accounted.
                t.reject_im = t.pt.z.imag();
            }
        }
        live.erase(std::remove_if(live.begin(), live.end(),
                                  [](const LiveTarget& t) { return t.lost; }),
                   live.end());
        // Removal shifts positions, so rebuild the bucket from target ids.
        bucket.clear();
        for (std::size_t j = 0; j < live.size(); ++j)
            if (std::find(confirmed_ids.begin(), confirmed_ids.end(), live[j].index) !=
                confirmed_ids.end())
                bucket.push_back(j);
    }

    void finish_round_record(const RoundDriver& rd,
                             const std::vector<std::pair<std::size_t, std::size_t>>& spans) {
        if (!want_polyline()) return;
        RoundRecord rec;
        rec.dt = p.dt;
        rec.spans = spans;
        std::size_t end_index = spans.empty() ? 0 : spans.back().second;
        rec.w.assign(rd.drv.w.begin(),
                     rd.drv.w.begin() + static_cast<std::ptrdiff_t>(end_index + 1));
        records.push_back(std::move(rec));
    }

    // Polyline of the arch grown over the last recorded span, in the round's
    // start frame. Points are sampled as preimages of axis points around the
    // seal, walked back through the capture span and then through every
    // earlier span of the round; earlier arches were swallowed whole, so the
    // samples stay outside their throats and the inversion is stable. The
    // polyline runs from an anchor on the boundary at the seal side, over
    // the arch, to an anchor at the root side, so the implicit closing chord
    // of a winding sum follows the boundary and a positive excursion winds
    // +1 around what it encloses. Sampling is adaptive: the longest chord in
    // the output frame is split until the point budget runs out.
    std::vector<std::complex<double>>
    bubble_polyline(const std::vector<double>& w,
                    const std::vector<std::pair<std::size_t, std::size_t>>& spans, int sign,
                    std::size_t budget) const {
        std::size_t begin = spans.back().first;
        std::size_t end = spans.back().second;
        double scale = std::sqrt(2.0 * static_cast<double>(end - begin) * p.dt);
        double floor_im = 1e-3 * scale;
        double ws = w[end - 1];
        auto mid_of = [&](double x) { return arch_point(w, begin, end, p.dt, x); };
        auto full_of = [&](std::complex<double> q) {
            for (std::size_t s = spans.size() - 1; s-- > 0;)
                for (std::size_t j = spans[s].second; j > spans[s].first; --j)
                    q = slit_step_inverse(q, w[j - 1], p.dt);
            return q;
        };
        double xa = ws - 3.0 * scale, xb = ws + 3.0 * scale;
        for (int i = 0; i < 8 && mid_of(xa).imag() > floor_im; ++i) xa -= 3.0 * scale;
        for (int i = 0; i < 8 && mid_of(xb).imag() > floor_im; ++i) xb += 3.0 * scale;
        budget = std::max<std::size_t>(budget, 8);
        struct Pt {
            std::complex<double> mid, full;
        };
        std::map<double, Pt> pts;
        auto sample = [&](double x) {
            std::complex<double> m = mid_of(x);
            pts.emplace(x, Pt{m, full_of(m)});
        };
        std::size_t seeds = std::max<std::size_t>(budget / 6, 16);
        for (std::size_t j = 0; j <= seeds; ++j) sample(xa + (xb - xa) * j / seeds);
        double min_dx = 1e-7 * (xb - xa);
        using Chord = std::pair<double, std::pair<double, double>>;
        std::priority_queue<Chord> queue;
        auto push_chord = [&](double x1, double x2) {
            if (x2 - x1 >= min_dx)
                queue.push({std::abs(pts[x2].full - pts[x1].full), {x1, x2}});
        };
        for (auto it = pts.begin(); std::next(it) != pts.end(); ++it)
            push_chord(it->first, std::next(it)->first);
        while (pts.size() < budget && !queue.empty()) {
            auto [len, seg] = queue.top();
            queue.pop();
            double mid = 0.5 * (seg.first + seg.second);
            sample(mid);
            push_chord(seg.first, mid);
            push_chord(mid, seg.second);
        }
        // Trim the on-axis margins to one anchor on each side of the arch.
        std::vector<Pt> ordered;
        ordered.reserve(pts.size());
        for (const auto& [x, q] : pts) ordered.push_back(q);
        std::size_t lo = 0, hi = ordered.size();
        while (lo + 1 < hi && ordered[lo + 1].mid.imag() <= floor_im) ++lo;
        while (hi > lo + 2 && ordered[hi - 2].mid.imag() <= floor_im) --hi;
        std::vector<std::complex<double>> out_pts;
        out_pts.reserve(hi - lo);
        for (std::size_t j = lo; j < hi; ++j) out_pts.push_back(ordered[j].full);
        // Emit from the seal side to the root side: this winds positive
        // excursions +1 and ends at the loop's root for either sign.
        if (sign > 0) std::reverse(out_pts.begin(), out_pts.end());
        return out_pts;
    }

    void register_capture(const RoundDriver& rd, const DriverExcursion& exc,
                          const std::vector<std::pair<std::size_t, std::size_t>>& spans,
                          const std::vector<std::size_t>& bucket) {
        QuasiLoop loop;
        loop.orientation = exc.sign;
        loop.hcap = 2.0 * exc.duration;
        loop.micro = !exc.macro;
        loop.end_time = clock;
        if (want_polyline()) {
            auto poly = bubble_polyline(rd.drv.w, spans, exc.sign,
                                        static_cast<std::size_t>(p.polyline_points));
            if (p.pull_back_polyline)
                for (std::complex<double>& q : poly) q = pull_back(q, records);
            loop.root = poly.back();
            loop.closure_gap = std::abs(poly.front() - poly.back());
            loop.polyline = std::move(poly);
        }
        int loop_index = static_cast<int>(out.loops.size());
        DisconnectionEvent ev;
        ev.time = clock;
        ev.loop_index = loop_index;
        for (std::size_t j : bucket) {
            LiveTarget& t = live[j];
            t.pt.swallowed = true;
            loop.surrounded_targets.push_back(out.targets[t.index]);
            ev.enclosed.push_back(t.index);
            TargetOutcome& o = out.outcomes[t.index];
            o.captured = true;
            o.loop_index = loop_index;
            o.log_cr = std::log(conformal_radius(t.pt));
            o.orientation = exc.sign;
            o.micro = loop.micro;
        }
        out.loops.push_back(std::move(loop));
        std::vector<LiveTarget> rest;
        for (const LiveTarget& t : live)
            if (!t.pt.swallowed) rest.push_back(t);
        live.swap(rest);
        for (const LiveTarget& t : live) ev.remaining.push_back(t.index);
        out.tree.push_back(std::move(ev));
    }
};

} // namespace

CleSample branching_sample(const ExploreParams& params,
                           const std::vector<std::complex<double>>& targets, Rng rng) {
    Engine eng(params, targets, rng);
    eng.run();
    return std::move(eng.out);
}

RadialResult radial_explore(const ExploreParams& params, std::complex<double> target, Rng rng) {
    CleSample s = branching_sample(params, {target}, rng);
    RadialResult res;
    res.rounds = s.rounds;
    res.renormalization_times = std::move(s.renormalization_times);
    res.ok = s.ok && s.outcomes[0].captured;
    res.outcome = s.outcomes[0];
    if (!s.loops.empty()) res.loop = std::move(s.loops.front());
    return res;
}

CrTrajectory explore_cr_trajectory(const ExploreParams& params, std::complex<double> target,
                                   double time_cap, Rng rng) {
    Engine eng(params, {target}, rng);
    CrTrajectory traj;
    traj.times.push_back(0.0);
    traj.cr.push_back(2.0 * target.imag());
    eng.traj = &traj;
    eng.traj_cap = time_cap;
    eng.run();
    return traj;
}

double calibrated_c(const ExploreParams& params, Rng rng, std::size_t min_macros) {
    return grid_c_estimate(delta_from_kappa(params.kappa), params.dt, params.r, min_macros, rng);
}

double stop_at_tau_eps(const CrTrajectory& traj, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("stop_at_tau_eps: eps must be positive");
    double cap = 1.0 / eps;
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        if (traj.cr[j] <= 2.0 * eps) return std::min(traj.times[j], cap);
        if (traj.capture_time >= 0.0 && traj.times[j] >= traj.capture_time)
            return std::min(traj.capture_time, cap);
    }
    return cap;
}

int winding_number(const std::vector<std::complex<double>>& polyline, std::complex<double> p) {
    if (polyline.size() < 3) return 0;
    double total = 0.0;
    for (std::size_t j = 0; j < polyline.size(); ++j) {
        std::complex<double> a = polyline[j] - p;
        std::complex<double> b = polyline[(j + 1) % polyline.size()] - p;
        if (a == std::complex<double>(0.0, 0.0) || b == std::complex<double>(0.0, 0.0)) return 0;
        total += std::arg(b / a);
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

} // namespace cle
