#include "augsel/synthdata.hpp"

#include <cmath>

#include "augsel/idx.hpp"

namespace augsel::synth {

namespace {

constexpr int kSize = 28;
constexpr int kSuper = 2;  // supersampling factor
constexpr double kPi = 3.14159265358979323846;

double uniform_in(rng::Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * rng::uniform01(eng);
}

// distance from (px,py) to the arc of the circle (cx,cy,r) spanning the CCW
// angle interval [a0, a1]
double arc_distance(double px, double py, double cx, double cy, double r, double a0, double a1) {
  const double dx = px - cx, dy = py - cy;
  const double ang = std::atan2(dy, dx);
  double t = std::fmod(ang - a0, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  if (t <= a1 - a0) return std::abs(std::hypot(dx, dy) - r);
  const double d0 = std::hypot(px - (cx + r * std::cos(a0)), py - (cy + r * std::sin(a0)));
  const double d1 = std::hypot(px - (cx + r * std::cos(a1)), py - (cy + r * std::sin(a1)));
  return std::min(d0, d1);
}

struct GlyphStyle {
  double cx, cy, r_up, r_lo, thick, rot_rad, fg, gap_rad;
};

GlyphStyle draw_style(bool closed, rng::Engine& eng) {
  GlyphStyle s;
  s.cx = 13.5 + uniform_in(eng, -1.5, 1.5);
  s.cy = 13.5 + uniform_in(eng, -1.5, 1.5);
  s.r_up = uniform_in(eng, 4.2, 5.6);
  s.r_lo = uniform_in(eng, 4.6, 6.2);
  s.thick = uniform_in(eng, 1.4, 2.6);
  s.rot_rad = uniform_in(eng, -10.0, 10.0) * kPi / 180.0;
  s.fg = uniform_in(eng, 190.0, 255.0);
  double gap_deg;
  if (closed) {
    // mostly-shut rings with a tail of partially open ones
    gap_deg = rng::uniform01(eng) < 0.10 ? uniform_in(eng, 45.0, 85.0)
                                         : std::abs(10.0 * rng::normal(eng));
  } else {
    gap_deg = rng::uniform01(eng) < 0.10 ? uniform_in(eng, 50.0, 80.0)
                                         : 115.0 + 14.0 * rng::normal(eng);
  }
  s.gap_rad = std::clamp(gap_deg * kPi / 180.0, 0.0, 1.2 * kPi);
  return s;
}

RawImage render(const GlyphStyle& s, double noise_sd, rng::Engine& eng) {
  const int n = kSize * kSuper;
  std::vector<double> canvas(static_cast<std::size_t>(n) * n, 0.0);
  const double c0 = (kSize - 1) / 2.0;
  const double ring_cy[2] = {s.cy - s.r_up * 0.95, s.cy + s.r_lo * 0.95};
  const double ring_r[2] = {s.r_up, s.r_lo};
  const double a0 = kPi + s.gap_rad / 2.0;
  const double a1 = 3.0 * kPi - s.gap_rad / 2.0;
  const double cr = std::cos(s.rot_rad), sr = std::sin(s.rot_rad);
  for (int yy = 0; yy < n; ++yy) {
    const double py = (yy + 0.5) / kSuper - 0.5;
    for (int xx = 0; xx < n; ++xx) {
      const double px = (xx + 0.5) / kSuper - 0.5;
      const double qx = c0 + cr * (px - c0) + sr * (py - c0);
      const double qy = c0 - sr * (px - c0) + cr * (py - c0);
      double v = 0.0;
      for (int ring = 0; ring < 2; ++ring) {
        const double d = arc_distance(qx, qy, s.cx, ring_cy[ring], ring_r[ring], a0, a1);
        v = std::max(v, std::clamp(s.thick / 2.0 + 0.5 - d, 0.0, 1.0));
      }
      canvas[static_cast<std::size_t>(yy) * n + xx] = v;
    }
  }
  RawImage img = RawImage::zeros(kSize, kSize, 1);
  for (int y = 0; y < kSize; ++y) {
    for (int x = 0; x < kSize; ++x) {
      double acc = 0.0;
      for (int j = 0; j < kSuper; ++j)
        for (int i = 0; i < kSuper; ++i)
          acc += canvas[static_cast<std::size_t>(y * kSuper + j) * n + (x * kSuper + i)];
      double v = acc / (kSuper * kSuper) * s.fg;
      if (noise_sd > 0.0) v += noise_sd * rng::normal(eng);
      long q = std::lround(v);
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
    }
  }
  return img;
}

}  // namespace

RawImage render_ring_glyph(bool closed, rng::Engine& eng) {
  return render(draw_style(closed, eng), 5.0, eng);
}

Corpus glyph_corpus(int n, std::uint64_t seed) {
  require(n > 0, ErrorKind::invalid_argument, "corpus size must be positive");
  Corpus corpus;
  auto eng = rng::make_engine(seed);
  for (int i = 0; i < n; ++i) {
    const bool closed = i % 2 == 1;
    corpus.images.push_back(render_ring_glyph(closed, eng));
    corpus.labels.push_back(closed ? 8 : 3);
  }
  return corpus;
}

Corpus template_corpus(int n, int n_templates, double noise_sd, std::uint64_t seed) {
  require(n > 0 && n_templates > 0, ErrorKind::invalid_argument, "sizes must be positive");
  std::vector<RawImage> templates;
  templates.reserve(static_cast<std::size_t>(n_templates));
  for (int t = 0; t < n_templates; ++t) {
    auto teng = rng::make_engine(rng::derive(seed, {100, static_cast<std::uint64_t>(t)}));
    templates.push_back(render(draw_style(t % 2 == 1, teng), 0.0, teng));
  }
  Corpus corpus;
  auto eng = rng::make_engine(rng::derive(seed, {200}));
  for (int i = 0; i < n; ++i) {
    const int t = i % n_templates;
    RawImage img = templates[static_cast<std::size_t>(t)];
    for (auto& p : img.pixels) {
      long q = std::lround(p + noise_sd * rng::normal(eng));
      p = static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
    }
    corpus.images.push_back(std::move(img));
    corpus.labels.push_back(t % 2 == 1 ? 8 : 3);
  }
  return corpus;
}

void write_idx_corpus(const Corpus& corpus, const std::filesystem::path& images_path,
                      const std::filesystem::path& labels_path) {
  write_idx_images(images_path, corpus.images);
  write_idx_labels(labels_path, corpus.labels);
}

}  // namespace augsel::synth
