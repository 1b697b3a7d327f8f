#include "opc/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>

#include "nlohmann/json.hpp"
#include "opc/io.hpp"
#include "opc/raster.hpp"

namespace opc {

namespace {

double segment_scalar_gradient(const EdgeGradient& eg, const Segment& s, size_t i) {
  return eg.rows[i][0] * s.vel.x + eg.rows[i][1] * s.vel.y;
}

struct SegmentGates {
  std::vector<double> tau;        // sigmoid gate, applied to shrinking motion
  std::vector<double> allow_out;  // rounded px budget for outward motion (spacing)
  std::vector<double> allow_in;   // rounded px budget for inward motion (width)
};

// Most restrictive gate across a segment's active check pairs. The sigmoid
// decays motion that shrinks a checked distance; on top of that each pair's
// integer slack (gap - rule) is split between its two sides so that, even
// after rounding, one step can never push the gap below the rule.
SegmentGates gate_factors(const SegmentSet& merged,
                          const std::vector<double>& scalar_grads,
                          const MrcRuleSet& rules) {
  const double max_rule = std::max(rules.min_width, rules.min_spacing);
  const auto pairs = extract_check_pairs(merged, rules, 2.0 * max_rule);
  const double inf = std::numeric_limits<double>::infinity();
  SegmentGates g;
  g.tau.assign(merged.segments.size(), 1.0);
  g.allow_out.assign(merged.segments.size(), inf);
  g.allow_in.assign(merged.segments.size(), inf);
  for (const auto& p : pairs) {
    const double d_const =
        p.kind == CheckKind::Spacing ? rules.min_spacing : rules.min_width;
    const double t = gate_factor(p.gap, d_const, rules.beta);
    const double slack = std::max(0.0, p.gap - d_const);
    const double allow_a = std::ceil(slack / 2.0);
    const double allow_b = std::floor(slack / 2.0);
    const double grad_a = scalar_grads[p.seg_a];
    const double grad_b = scalar_grads[p.seg_b];
    // motion is -lr*grad along +v; outward motion (grad<0) shrinks spacing
    // gaps, inward motion (grad>0) shrinks widths
    if (p.kind == CheckKind::Spacing) {
      g.allow_out[p.seg_a] = std::min(g.allow_out[p.seg_a], allow_a);
      g.allow_out[p.seg_b] = std::min(g.allow_out[p.seg_b], allow_b);
      if (grad_a < 0.0) g.tau[p.seg_a] = std::min(g.tau[p.seg_a], t);
      if (grad_b < 0.0) g.tau[p.seg_b] = std::min(g.tau[p.seg_b], t);
    } else {
      g.allow_in[p.seg_a] = std::min(g.allow_in[p.seg_a], allow_a);
      g.allow_in[p.seg_b] = std::min(g.allow_in[p.seg_b], allow_b);
      if (grad_a > 0.0) g.tau[p.seg_a] = std::min(g.tau[p.seg_a], t);
      if (grad_b > 0.0) g.tau[p.seg_b] = std::min(g.tau[p.seg_b], t);
    }
  }
  return g;
}

struct SrafBookkeeping {
  std::vector<bool> ring_alive;
};

SegmentSet drop_rings(const SegmentSet& in, const std::vector<bool>& keep) {
  SegmentSet out;
  for (size_t r = 0; r < in.rings.size(); ++r) {
    if (!keep[r]) continue;
    std::vector<int> ring;
    for (int idx : in.rings[r]) {
      ring.push_back(out.count());
      out.segments.push_back(in.segments[idx]);
    }
    out.rings.push_back(std::move(ring));
    out.ring_is_sraf.push_back(in.sraf_ring(static_cast<int>(r)));
  }
  return out;
}

// True if any pixel of the (rasterized) ring prints in z_hard, or the ring
// has collapsed below the width floor.
bool sraf_should_prune(const SegmentSet& merged, int ring, const RealGrid& z_hard,
                       double min_width) {
  double x0 = 1e18, y0 = 1e18, x1 = -1e18, y1 = -1e18;
  for (int idx : merged.rings[ring]) {
    const Segment& s = merged.segments[idx];
    x0 = std::min({x0, s.start.x, s.end.x});
    y0 = std::min({y0, s.start.y, s.end.y});
    x1 = std::max({x1, s.start.x, s.end.x});
    y1 = std::max({y1, s.start.y, s.end.y});
  }
  if (x1 - x0 < min_width || y1 - y0 < min_width) return true;
  SegmentSet solo;
  std::vector<int> ids;
  for (int idx : merged.rings[ring]) {
    ids.push_back(solo.count());
    solo.segments.push_back(merged.segments[idx]);
  }
  solo.rings.push_back(ids);
  const MaskGrid region = rasterize(solo, z_hard.width(), z_hard.height());
  for (size_t i = 0; i < region.size(); ++i)
    if (region[i] > 0.5 && z_hard[i] > 0.5) return true;
  return false;
}

OptimizeResult run_loop(const std::vector<Polygon>& target,
                        const std::vector<SrafSeed>& seeds,
                        const OptimizerConfig& config, const KernelSet& kernels) {
  const auto t_start = std::chrono::steady_clock::now();
  if (config.iterations < 1) throw ConfigError("iterations must be at least 1");
  if (config.learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");

  int w = config.width, h = config.height;
  if (w <= 0 || h <= 0) {
    double mx = 0, my = 0;
    for (const auto& p : target)
      for (const auto& v : p.vertices) {
        mx = std::max(mx, v.x);
        my = std::max(my, v.y);
      }
    w = static_cast<int>(mx) + 64;
    h = static_cast<int>(my) + 64;
  }

  const double min_seg = config.mrc_enabled ? config.rules.min_width : 0.0;
  SegmentSet target_segs = segment_edges(target, config.seg_length, min_seg);
  const MaskGrid target_mask = rasterize(merge_corners(ste_round(target_segs)), w, h);
  const EpeSamplePlan plan =
      make_epe_plan(target_segs, config.th_epe, config.gamma, w, h);

  SegmentSet params = target_segs;
  if (!seeds.empty()) {
    const auto sraf_polys = seeds_to_polygons(seeds, config.sraf);
    SegmentSet sraf_segs = segment_edges(sraf_polys, config.seg_length);
    for (auto& ring : sraf_segs.rings) {
      for (int& idx : ring) idx += params.count();
      params.rings.push_back(ring);
      params.ring_is_sraf.push_back(true);
    }
    params.segments.insert(params.segments.end(), sraf_segs.segments.begin(),
                           sraf_segs.segments.end());
  }

  LithoSim sim(kernels, w, h);
  OptimizeResult result;
  result.target_mask = target_mask;
  result.seeds = seeds;

  double initial_hard_l2 = -1.0;
  int stable_iters = 0;
  double prev_l2 = -1.0;

  for (int iter = 0; iter < config.iterations; ++iter) {
    const SegmentSet merged = merge_corners(ste_round(params));
    const MaskGrid mask = rasterize(merged, w, h);
    const auto fields = sim.simulate_full(mask);
    const CornerImages corner_imgs =
        corner_resists(fields.intensity, config.corners, config.alpha, config.i_th);
    const LossBundle bundle =
        total_loss_and_grad(corner_imgs, target_mask, plan, config.weights, sim, fields,
                            config.alpha, config.gamma);
    if (!std::isfinite(bundle.total)) {
      std::cerr << "optimize: non-finite loss at iteration " << iter << ", aborting\n";
      break;
    }
    if (initial_hard_l2 < 0.0)
      initial_hard_l2 =
          metric_l2(resist_hard(fields.intensity, config.i_th), target_mask);

    const EdgeGradient eg =
        compute_edge_gradients(bundle.dl_dm, merged, config.mean_segment_gradient);
    std::vector<double> scalar(merged.segments.size());
    for (size_t i = 0; i < merged.segments.size(); ++i)
      scalar[i] = segment_scalar_gradient(eg, merged.segments[i], i);

    int activations = 0;
    SegmentGates gates;
    if (config.mrc_enabled) {
      gates = gate_factors(merged, scalar, config.rules);
    } else {
      const double inf = std::numeric_limits<double>::infinity();
      gates.tau.assign(merged.segments.size(), 1.0);
      gates.allow_out.assign(merged.segments.size(), inf);
      gates.allow_in.assign(merged.segments.size(), inf);
    }

    const size_t n_seg = params.segments.size();
    std::vector<double> disp(n_seg, 0.0), lo_b(n_seg), hi_b(n_seg);
    for (size_t i = 0; i < n_seg; ++i) {
      lo_b[i] = -config.max_shift;
      hi_b[i] = config.max_shift;
      if (!std::isfinite(scalar[i])) {
        lo_b[i] = hi_b[i] = 0.0;
        continue;
      }
      const double raw = std::clamp(-config.learning_rate * scalar[i] * gates.tau[i],
                                    -config.max_shift, config.max_shift);
      double d = raw;
      const Segment& s = params.segments[i];
      if (std::isfinite(gates.allow_out[i]) || std::isfinite(gates.allow_in[i])) {
        // clamp the prospective rounded coordinate along +v so the rounded
        // motion stays within the per-pair slack budget
        const double c = s.start.x * s.vel.x + s.start.y * s.vel.y;
        const double r = round_half_away(c);
        lo_b[i] = std::min(r - gates.allow_in[i] - 0.49 - c, 0.0);
        hi_b[i] = std::max(r + gates.allow_out[i] + 0.49 - c, 0.0);
        d = std::clamp(d, lo_b[i], hi_b[i]);
      }
      if (gates.tau[i] < 0.999 || d != raw) activations++;
      disp[i] = d;
    }

    if (config.mrc_enabled) {
      // a jog between same-edge neighbors cuts a tab as wide as the shorter
      // segment; couple runs containing sub-min-width segments so they move
      // rigidly and no such tab can form
      for (const auto& ring : params.rings) {
        const int n = static_cast<int>(ring.size());
        for (int i = 0; i < n;) {
          int j = i;
          while (j < n && params.segments[ring[j]].edge_id ==
                              params.segments[ring[i]].edge_id)
            ++j;
          bool has_short = false;
          for (int k = i; k < j; ++k) {
            const Segment& s = merged.segments[ring[k]];
            const double len =
                std::abs(s.end.x - s.start.x) + std::abs(s.end.y - s.start.y);
            if (len < config.rules.min_width) has_short = true;
          }
          if (has_short && j - i > 1) {
            double sum = 0.0, lo = -config.max_shift, hi = config.max_shift;
            for (int k = i; k < j; ++k) {
              sum += disp[ring[k]];
              lo = std::max(lo, lo_b[ring[k]]);
              hi = std::min(hi, hi_b[ring[k]]);
            }
            const double d = std::clamp(sum / (j - i), std::min(lo, 0.0),
                                        std::max(hi, 0.0));
            for (int k = i; k < j; ++k) disp[ring[k]] = d;
          }
          i = j;
        }
      }
    }

    double max_disp = 0.0;
    for (size_t i = 0; i < n_seg; ++i) {
      Segment& s = params.segments[i];
      s.start.x += disp[i] * s.vel.x;
      s.start.y += disp[i] * s.vel.y;
      s.end.x += disp[i] * s.vel.x;
      s.end.y += disp[i] * s.vel.y;
      max_disp = std::max(max_disp, std::abs(disp[i]));
    }

    result.log.push_back(
        {iter, bundle.l2, bundle.pvb, bundle.epe, bundle.total, max_disp, activations});

    // SRAF pruning cadence
    const bool has_srafs =
        std::any_of(params.ring_is_sraf.begin(), params.ring_is_sraf.end(),
                    [](bool b) { return b; });
    if (has_srafs && (iter % 10 == 9 || iter == config.iterations - 1)) {
      const RealGrid z_hard = resist_hard(fields.intensity, config.i_th);
      std::vector<bool> keep(params.rings.size(), true);
      bool changed = false;
      for (size_t r = 0; r < params.rings.size(); ++r) {
        if (!params.sraf_ring(static_cast<int>(r))) continue;
        if (sraf_should_prune(merged, static_cast<int>(r), z_hard,
                              config.sraf.min_surviving_width)) {
          keep[r] = false;
          changed = true;
        }
      }
      if (changed) params = drop_rings(params, keep);
    }

    if (config.early_stop) {
      const int epe_now =
          metric_epe(resist_hard(fields.intensity, config.i_th), target_mask, plan);
      if (epe_now == 0 && prev_l2 > 0.0 &&
          std::abs(prev_l2 - bundle.l2) < 1e-3 * prev_l2) {
        if (++stable_iters >= 10) break;
      } else {
        stable_iters = 0;
      }
      prev_l2 = bundle.l2;
    }
  }

  // final geometry and hard-threshold metrics
  SegmentSet final_merged = merge_corners(ste_round(params));
  MaskGrid final_mask = rasterize(final_merged, w, h);
  RealGrid intensity = sim.simulate(final_mask);

  // last-chance SRAF prune: non-printing at nominal is a hard invariant
  {
    const RealGrid z_hard = resist_hard(intensity, config.i_th);
    std::vector<bool> keep(params.rings.size(), true);
    bool changed = false;
    for (size_t r = 0; r < params.rings.size(); ++r) {
      if (!params.sraf_ring(static_cast<int>(r))) continue;
      if (sraf_should_prune(final_merged, static_cast<int>(r), z_hard,
                            config.sraf.min_surviving_width)) {
        keep[r] = false;
        changed = true;
      }
    }
    if (changed) {
      params = drop_rings(params, keep);
      final_merged = merge_corners(ste_round(params));
      final_mask = rasterize(final_merged, w, h);
      intensity = sim.simulate(final_mask);
    }
  }

  const RealGrid z_nom = resist_hard(intensity, config.i_th);
  RealGrid i_max(w, h), i_min(w, h);
  double dose_max = 1.0, dose_min = 1.0;
  for (const auto& c : config.corners) {
    dose_max = std::max(dose_max, c.dose_scale);
    dose_min = std::min(dose_min, c.dose_scale);
  }
  for (size_t i = 0; i < intensity.size(); ++i) {
    i_max[i] = intensity[i] * dose_max;
    i_min[i] = intensity[i] * dose_min;
  }
  result.final_segments = final_merged;
  result.final_mask = final_mask;
  result.final_polygons = to_polygons(final_merged);
  result.metrics.l2 = metric_l2(z_nom, target_mask);
  result.metrics.pvb = metric_pvb(resist_hard(i_max, config.i_th),
                                  resist_hard(i_min, config.i_th));
  result.metrics.epe_count = metric_epe(z_nom, target_mask, plan);
  result.metrics.shots = shot_count(final_mask);
  result.metrics.initial_l2 = initial_hard_l2 < 0.0 ? result.metrics.l2 : initial_hard_l2;
  result.metrics.tat_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace

OptimizeResult optimize(const std::vector<Polygon>& target, const OptimizerConfig& config,
                        const KernelSet& kernels) {
  return run_loop(target, {}, config, kernels);
}

OptimizeResult optimize_with_srafs(const std::vector<Polygon>& target,
                                   const std::vector<SrafSeed>& seeds,
                                   const OptimizerConfig& config,
                                   const KernelSet& kernels) {
  return run_loop(target, seeds, config, kernels);
}

OptimizerConfig parse_config_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  OptimizerConfig c;
  c.iterations = j.value("iterations", c.iterations);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.seg_length = j.value("seg_length", c.seg_length);
  c.alpha = j.value("alpha", c.alpha);
  c.beta = j.value("beta", c.beta);
  c.gamma = j.value("gamma", c.gamma);
  if (j.contains("weights")) {
    const auto& wj = j["weights"];
    c.weights = {wj.at(0).get<double>(), wj.at(1).get<double>(), wj.at(2).get<double>()};
  }
  c.th_epe = j.value("th_epe", c.th_epe);
  c.i_th = j.value("i_th", c.i_th);
  if (j.contains("dose_corners")) {
    c.corners.clear();
    for (const auto& d : j["dose_corners"]) c.corners.push_back({d.get<double>()});
  }
  c.mrc_enabled = j.value("mrc_enabled", c.mrc_enabled);
  c.sraf_enabled = j.value("sraf_enabled", c.sraf_enabled);
  c.seed = j.value("seed", c.seed);
  c.max_shift = j.value("max_shift", c.max_shift);
  c.width = j.value("width", c.width);
  c.height = j.value("height", c.height);
  c.early_stop = j.value("early_stop", c.early_stop);
  c.mean_segment_gradient = j.value("mean_segment_gradient", c.mean_segment_gradient);
  if (j.contains("rules")) {
    const auto& r = j["rules"];
    c.rules.min_width = r.value("min_width", c.rules.min_width);
    c.rules.min_spacing = r.value("min_spacing", c.rules.min_spacing);
    c.rules.eol_spacing = r.value("eol_spacing", c.rules.eol_spacing);
    c.rules.notch_spacing = r.value("notch_spacing", c.rules.notch_spacing);
    c.rules.jog_spacing = r.value("jog_spacing", c.rules.jog_spacing);
    c.rules.beta = r.value("beta", c.rules.beta);
  }
  if (j.contains("sraf")) {
    const auto& s = j["sraf"];
    c.sraf.max_srafs = s.value("max_srafs", c.sraf.max_srafs);
    c.sraf.seed_size = s.value("seed_size", c.sraf.seed_size);
    c.sraf.upsample = s.value("upsample", c.sraf.upsample);
    c.sraf.clearance = s.value("clearance", c.sraf.clearance);
    c.sraf.min_surviving_width = s.value("min_surviving_width", c.sraf.min_surviving_width);
  }
  return c;
}

namespace {

std::string format_csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int run_from_config(const std::string& config_path, const RunOverrides& overrides) {
  try {
    const nlohmann::json j = nlohmann::json::parse(read_file(config_path));
    const OptimizerConfig config = parse_config_json(j.dump());

    const std::string layout_path =
        overrides.layout.value_or(j.value("layout", std::string{}));
    const std::string kernel_path =
        overrides.kernels.value_or(j.value("kernels", std::string{}));
    const std::string out_dir =
        overrides.out_dir.value_or(j.value("out", std::string{"."}));
    if (layout_path.empty()) throw ConfigError("no layout file given");
    if (kernel_path.empty()) throw ConfigError("no kernel file given");

    const Layout layout = load_layout(layout_path);
    const KernelSet kernels = load_kernels(kernel_path);
    OptimizerConfig cfg = config;
    if (cfg.width == 0) cfg.width = layout.width;
    if (cfg.height == 0) cfg.height = layout.height;

    OptimizeResult result;
    if (cfg.sraf_enabled) {
      // seed at 1/upsample resolution against a downsampled clip
      const int lw = std::max(1, cfg.width / cfg.sraf.upsample);
      const int lh = std::max(1, cfg.height / cfg.sraf.upsample);
      std::vector<Polygon> low_polys;
      for (const auto& p : layout.polygons) {
        Polygon lp;
        for (const auto& v : p.vertices)
          lp.vertices.push_back({std::round(v.x / cfg.sraf.upsample),
                                 std::round(v.y / cfg.sraf.upsample)});
        low_polys.push_back(std::move(lp));
      }
      const SegmentSet low_segs =
          segment_edges(low_polys, std::max(4.0, cfg.seg_length / cfg.sraf.upsample));
      const MaskGrid low_target = rasterize(merge_corners(ste_round(low_segs)), lw, lh);
      int klow = std::max(5, kernels.size / cfg.sraf.upsample) | 1;
      klow = std::min(klow, 2 * (std::min(lw, lh) / 2) - 1);
      const KernelSet low_kernels =
          make_synthetic_kernels(klow, kernels.count(), 1.0, cfg.seed);
      const auto seeds =
          generate_sraf_seeds(low_target, low_kernels, cfg.sraf, cfg.alpha, cfg.i_th);
      result = optimize_with_srafs(layout.polygons, seeds, cfg, kernels);
    } else {
      result = optimize(layout.polygons, cfg, kernels);
    }

    std::filesystem::create_directories(out_dir);
    save_pgm(result.final_mask, out_dir + "/mask.pgm");
    Layout out_layout;
    out_layout.width = result.final_mask.width();
    out_layout.height = result.final_mask.height();
    out_layout.polygons = result.final_polygons;
    save_layout(out_layout, out_dir + "/geometry.json");
    write_file(out_dir + "/metrics.json", metrics_to_json(result.metrics) + "\n");

    std::string csv = "iter,l2,pvb,epe,total,max_displacement,gate_activations\n";
    for (const auto& l : result.log) {
      csv += std::to_string(l.iter) + "," + format_csv_double(l.l2) + "," +
             format_csv_double(l.pvb) + "," + format_csv_double(l.epe) + "," +
             format_csv_double(l.total) + "," + format_csv_double(l.max_displacement) +
             "," + std::to_string(l.gate_activations) + "\n";
    }
    write_file(out_dir + "/convergence.csv", csv);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace opc
