#include "artifact/axioms.hpp"

#include <cmath>
#include <complex>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace sgff {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI{0.0, 1.0};

std::string format_cplx(cplx z) {
  std::ostringstream os;
  os << std::setprecision(15) << z.real() << (z.imag() < 0 ? " - " : " + ")
     << std::abs(z.imag()) << "i";
  return os.str();
}

double pick(const ToleranceMap& overrides, const std::string& axiom, double fallback) {
  const auto it = overrides.find(axiom);
  return it == overrides.end() ? fallback : it->second;
}

cplx phase_winding(double a_over_beta) {
  return std::exp(cplx{0.0, 2.0 * kPi * a_over_beta});
}

}  // namespace

AxiomReport check_axiom(std::string axiom, std::string detail, cplx lhs, cplx rhs,
                        double tolerance) {
  AxiomReport out;
  out.axiom = std::move(axiom);
  out.detail = std::move(detail);
  out.lhs = lhs;
  out.rhs = rhs;
  out.abs_err = std::abs(lhs - rhs);
  out.rel_err = std::abs(rhs) < 1e-12 ? out.abs_err : out.abs_err / std::abs(rhs);
  out.tolerance = tolerance;
  out.passed = out.rel_err <= tolerance;
  return out;
}

cplx closed_form_two_particle(const Kernel& kernel, cplx theta, bool antisoliton_first) {
  const double s = antisoliton_first ? -1.0 : 1.0;
  const double xi = kernel.xi();
  const cplx shifted = theta + cplx{0.0, kPi};
  return kernel.G(theta) / kernel.c1() / std::tan(kPi * xi / 2.0) * cplx{0.0, 4.0} *
         std::cosh(theta / 2.0) * std::exp(s * shifted / (2.0 * xi)) /
         (xi * std::sinh(shifted / xi));
}

cplx free_fermion_four(const std::vector<cplx>& rapidities, double a_over_beta) {
  if (rapidities.size() != 4) {
    throw std::invalid_argument("free_fermion_four expects 4 rapidities");
  }
  const cplx t1 = rapidities[0], t2 = rapidities[1], t3 = rapidities[2], t4 = rapidities[3];
  const double amp = std::sin(kPi * a_over_beta);
  return amp * amp * std::exp(a_over_beta * (t4 + t3 - t2 - t1)) *
         std::sinh((t1 - t2) / 2.0) * std::sinh((t3 - t4) / 2.0) /
         (std::cosh((t3 - t1) / 2.0) * std::cosh((t3 - t2) / 2.0) *
          std::cosh((t4 - t1) / 2.0) * std::cosh((t4 - t2) / 2.0));
}

cplx free_fermion_six(const std::vector<cplx>& rapidities, double a_over_beta) {
  if (rapidities.size() != 6) {
    throw std::invalid_argument("free_fermion_six expects 6 rapidities");
  }
  const auto& t = rapidities;
  const double amp = std::sin(kPi * a_over_beta);
  cplx numer = std::sinh((t[0] - t[1]) / 2.0) * std::sinh((t[0] - t[2]) / 2.0) *
               std::sinh((t[1] - t[2]) / 2.0) * std::sinh((t[3] - t[4]) / 2.0) *
               std::sinh((t[3] - t[5]) / 2.0) * std::sinh((t[4] - t[5]) / 2.0);
  cplx denom{1.0, 0.0};
  for (int i = 3; i < 6; ++i) {
    for (int j = 0; j < 3; ++j) {
      denom *= std::cosh((t[i] - t[j]) / 2.0);
    }
  }
  return -kI * amp * amp * amp *
         std::exp(a_over_beta * (t[5] + t[4] + t[3] - t[2] - t[1] - t[0])) * numer / denom;
}

std::vector<AxiomReport> run_axiom_suite(int level, const FFConfig& config,
                                         const ToleranceMap& overrides) {
  if (level != 2 && level != 4 && level != 6) {
    throw std::invalid_argument("axiom suite level must be 2, 4, or 6");
  }

  std::vector<AxiomReport> out;
  FormFactorEvaluator ev(config);
  const Kernel& kernel = ev.kernel();
  const double aob = config.a_over_beta;

  const auto lorentz_shift = [&](const std::vector<int>& sig, std::vector<cplx> rap,
                                 const char* detail) {
    const cplx base = ev.evaluate(sig, rap).value;
    for (auto& r : rap) r += 1.0;
    const cplx shifted = ev.evaluate(sig, rap).value;
    out.push_back(check_axiom("lorentz", detail, shifted, base, pick(overrides, "lorentz", 1e-5)));
  };

  if (level == 2) {
    FFConfig unit = config;
    unit.a_over_beta = 1.0;
    FormFactorEvaluator evu(unit);
    const cplx theta{0.6, 0.0};
    out.push_back(check_axiom(
        "closed-form-2pt", "antisoliton-soliton at theta=0.6, a/b=1",
        evu.ff2(theta, cplx{}), closed_form_two_particle(evu.kernel(), theta, true),
        pick(overrides, "closed-form-2pt", 1e-8)));
    out.push_back(check_axiom(
        "closed-form-2pt", "soliton-antisoliton at theta=0.6, a/b=1",
        evu.ff2(theta, cplx{}, {+1, -1}), closed_form_two_particle(evu.kernel(), theta, false),
        pick(overrides, "closed-form-2pt", 1e-8)));
    lorentz_shift({-1, +1}, {cplx{3.1, 0.0}, cplx{}}, "2 particles, z=1");
  }

  if (level == 4) {
    const std::vector<int> sig{-1, -1, +1, +1};
    const std::vector<cplx> base{{7.6, 0.0}, {7.0, 0.0}, {7.2, 0.0}, {6.0, -kPi}};
    const cplx direct = ev.evaluate(sig, base).value;

    lorentz_shift(sig, base, "4 particles, z=1");

    out.push_back(check_axiom("watson-exchange", "swap of positions 2 and 3", direct,
                              ev.evaluate_exchanged(sig, base, 1),
                              pick(overrides, "watson-exchange", 1e-5)));

    std::vector<cplx> wound = base;
    wound[3] += cplx{0.0, 2.0 * kPi};
    const cplx rotated =
        ev.evaluate({+1, -1, -1, +1}, {base[3], base[0], base[1], base[2]}).value;
    out.push_back(check_axiom("cyclic", "last rapidity wound by 2i*pi vs rotated ordering",
                              ev.evaluate(sig, wound).value, phase_winding(aob) * rotated,
                              pick(overrides, "cyclic", 1e-9)));

    const double eps = config.kinematic_epsilon;
    const std::vector<cplx> near_pole{
        {7.6, 0.0}, {7.0, 0.0}, {7.2, 0.0}, cplx{7.0 + eps, kPi}};
    const cplx offset = near_pole[3] - near_pole[1] - cplx{0.0, kPi};
    const cplx lhs_k = kI * offset * ev.evaluate(sig, near_pole).value;
    const cplx rhs_k =
        ev.ff2(near_pole[0], near_pole[2]) *
        (kernel.ST(near_pole[2] - near_pole[1]) -
         phase_winding(aob) * kernel.S(near_pole[1] - near_pole[0]));
    std::ostringstream kd;
    kd << "pole approached to " << std::setprecision(3) << eps << " in the 2-4 pair";
    out.push_back(check_axiom("kinematic-residue", kd.str(), lhs_k, rhs_k,
                              pick(overrides, "kinematic-residue", 1e-5)));

    FFConfig free_cfg = config;
    free_cfg.xi = 1.0;
    FormFactorEvaluator evf(free_cfg);
    const std::vector<cplx> real4{{7.6, 0.0}, {7.0, 0.0}, {7.2, 0.0}, {6.0, 0.0}};
    out.push_back(check_axiom("free-fermion", "4 particles at xi=1", evf.ff4(real4),
                              free_fermion_four(real4, aob),
                              pick(overrides, "free-fermion", 1e-10)));
  }

  if (level == 6) {
    const std::vector<int> sig{-1, -1, -1, +1, +1, +1};
    const std::vector<cplx> base{{2.1, 0.0}, {1.9, 0.0}, {6.0, 0.0},
                                 {5.9, 0.0}, {1.2, 0.0}, {5.5, kPi}};
    out.push_back(check_axiom("watson-exchange", "swap of positions 3 and 4",
                              ev.evaluate(sig, base).value, ev.evaluate_exchanged(sig, base, 2),
                              pick(overrides, "watson-exchange", 1e-6)));

    const double eps = 1e-5;
    const std::vector<cplx> near_pole{{2.1, 0.0}, {1.9, 0.0}, {5.9, 0.0},
                                      {1.2, 0.0}, {6.0, 0.0}, cplx{5.9 + eps, kPi}};
    const cplx offset = near_pole[5] - near_pole[2] - cplx{0.0, kPi};
    const cplx lhs_k = kI * offset * ev.evaluate(sig, near_pole).value;
    const cplx rhs_k =
        ev.ff4({near_pole[0], near_pole[1], near_pole[3], near_pole[4]}) *
        (kernel.ST(near_pole[4] - near_pole[2]) * kernel.ST(near_pole[3] - near_pole[2]) -
         phase_winding(aob) * kernel.S(near_pole[2] - near_pole[0]) *
             kernel.S(near_pole[2] - near_pole[1]));
    out.push_back(check_axiom("kinematic-residue", "pole approached to 1e-5 in the 3-6 pair",
                              lhs_k, rhs_k, pick(overrides, "kinematic-residue", 1e-3)));

    FFConfig free_cfg = config;
    free_cfg.xi = 1.0;
    FormFactorEvaluator evf(free_cfg);
    out.push_back(check_axiom("free-fermion", "6 particles at xi=1", evf.ff6(base),
                              free_fermion_six(base, aob),
                              pick(overrides, "free-fermion", 1e-10)));
  }

  return out;
}

std::string render_reports(const std::vector<AxiomReport>& reports) {
  std::ostringstream os;
  size_t passed = 0;
  for (const auto& r : reports) {
    os << (r.passed ? "[PASS] " : "[FAIL] ") << r.axiom;
    if (!r.detail.empty()) os << " (" << r.detail << ")";
    os << "\n       lhs = " << format_cplx(r.lhs) << "\n       rhs = " << format_cplx(r.rhs)
       << "\n       abs_err=" << std::setprecision(3) << std::scientific << r.abs_err
       << " rel_err=" << r.rel_err << " tol=" << r.tolerance << "\n"
       << std::defaultfloat;
    if (r.passed) ++passed;
  }
  os << passed << "/" << reports.size() << " checks passed\n";
  return os.str();
}

std::string reports_to_json(const std::vector<AxiomReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    arr.push_back({{"axiom", r.axiom},
                   {"detail", r.detail},
                   {"lhs", {{"re", r.lhs.real()}, {"im", r.lhs.imag()}}},
                   {"rhs", {{"re", r.rhs.real()}, {"im", r.rhs.imag()}}},
                   {"abs_err", r.abs_err},
                   {"rel_err", r.rel_err},
                   {"tolerance", r.tolerance},
                   {"passed", r.passed}});
  }
  return arr.dump(2);
}

}  // namespace sgff
