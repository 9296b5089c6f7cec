#include <cmath>
#include <numbers>

#include "pagesplit/metrics.hpp"

namespace pagesplit {
namespace {

constexpr double kPi = std::numbers::pi;

double deg(double rad) { return rad * 180.0 / kPi; }
double rad(double deg) { return deg * kPi / 180.0; }

double linearize(std::uint8_t v) {
  const double c = v / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  return t > 0.008856 ? std::cbrt(t) : 7.787 * t + 16.0 / 116.0;
}

/// Hue angle in degrees, [0, 360).
double hue(double b, double a) {
  if (a == 0 && b == 0) return 0;
  const double h = deg(std::atan2(b, a));
  return h < 0 ? h + 360.0 : h;
}

}  // namespace

Lab srgb_to_lab(const Rgb& c) {
  const double r = linearize(c.r);
  const double g = linearize(c.g);
  const double b = linearize(c.b);
  // D65 white, 2 degree observer.
  const double x = (0.412453 * r + 0.357580 * g + 0.180423 * b) / 0.95047;
  const double y = 0.212671 * r + 0.715160 * g + 0.072169 * b;
  const double z = (0.019334 * r + 0.119193 * g + 0.950227 * b) / 1.08883;
  const double fx = lab_f(x);
  const double fy = lab_f(y);
  const double fz = lab_f(z);
  const double L = y > 0.008856 ? 116.0 * fy - 16.0 : 903.3 * y;
  return {L, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double ciede2000(const Lab& x, const Lab& y) {
  const double c1 = std::hypot(x.a, x.b);
  const double c2 = std::hypot(y.a, y.b);
  const double c_bar7 = std::pow((c1 + c2) / 2.0, 7);
  const double g = 0.5 * (1.0 - std::sqrt(c_bar7 / (c_bar7 + std::pow(25.0, 7))));

  const double a1 = (1.0 + g) * x.a;
  const double a2 = (1.0 + g) * y.a;
  const double cp1 = std::hypot(a1, x.b);
  const double cp2 = std::hypot(a2, y.b);
  const double hp1 = hue(x.b, a1);
  const double hp2 = hue(y.b, a2);

  const double dL = y.L - x.L;
  const double dC = cp2 - cp1;
  double dh = 0;
  if (cp1 * cp2 != 0) {
    dh = hp2 - hp1;
    if (dh > 180) dh -= 360;
    else if (dh < -180) dh += 360;
  }
  const double dH = 2.0 * std::sqrt(cp1 * cp2) * std::sin(rad(dh / 2.0));

  const double L_bar = (x.L + y.L) / 2.0;
  const double cp_bar = (cp1 + cp2) / 2.0;
  double hp_bar = hp1 + hp2;
  if (cp1 * cp2 != 0) {
    if (std::abs(hp1 - hp2) <= 180) hp_bar /= 2.0;
    else if (hp1 + hp2 < 360) hp_bar = (hp1 + hp2 + 360) / 2.0;
    else hp_bar = (hp1 + hp2 - 360) / 2.0;
  }

  const double t = 1.0 - 0.17 * std::cos(rad(hp_bar - 30)) + 0.24 * std::cos(rad(2 * hp_bar)) +
                   0.32 * std::cos(rad(3 * hp_bar + 6)) - 0.20 * std::cos(rad(4 * hp_bar - 63));
  const double d_theta = 30.0 * std::exp(-std::pow((hp_bar - 275.0) / 25.0, 2));
  const double cp_bar7 = std::pow(cp_bar, 7);
  const double rc = 2.0 * std::sqrt(cp_bar7 / (cp_bar7 + std::pow(25.0, 7)));
  const double l50 = (L_bar - 50) * (L_bar - 50);
  const double sl = 1.0 + 0.015 * l50 / std::sqrt(20.0 + l50);
  const double sc = 1.0 + 0.045 * cp_bar;
  const double sh = 1.0 + 0.015 * cp_bar * t;
  const double rt = -std::sin(rad(2 * d_theta)) * rc;

  const double tl = dL / sl;
  const double tc = dC / sc;
  const double th = dH / sh;
  return std::sqrt(tl * tl + tc * tc + th * th + rt * tc * th);
}

}  // namespace pagesplit
