#include "tweezer/experiment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "detail/parallel.hpp"
#include "tweezer/rng.hpp"

namespace tweezer {

void validate(const TweezerBeam& beam) {
  require(beam.power > 0.0 && std::isfinite(beam.power), "beam: power must be positive");
  require(beam.waist > 0.0 && std::isfinite(beam.waist), "beam: waist must be positive");
  require(beam.wavelength > 0.0 && std::isfinite(beam.wavelength), "beam: wavelength must be positive");
}

void validate(const AtomicLines& lines) {
  require(!lines.lines.empty(), "atomic lines: at least one transition required");
  for (const auto& l : lines.lines) {
    require(l.omega0 > 0.0, "atomic lines: transition frequency must be positive (" + l.label + ")");
    require(l.linewidth > 0.0, "atomic lines: linewidth must be positive (" + l.label + ")");
    require(l.weight > 0.0, "atomic lines: weight must be positive (" + l.label + ")");
  }
  require(lines.hyperfine_splitting >= 0.0, "atomic lines: hyperfine splitting must be non-negative");
}

namespace {

double wavelength_to_omega(double lambda, const PhysicalConstants& k) { return kTwoPi * k.speed_of_light / lambda; }

double beam_omega(const TweezerBeam& beam, const AtomicLines& lines, const PhysicalConstants& k) {
  validate(beam);
  validate(lines);
  const double w = wavelength_to_omega(beam.wavelength, k);
  for (const auto& l : lines.lines)
    if (std::abs(l.omega0 - w) <= 10.0 * l.linewidth)
      fail(ErrorCode::Validity, "tweezer wavelength within 10 linewidths of " + l.label);
  return w;
}

// Two-level light shift of one line per unit intensity (J m^2 / W).
double line_shift(const AtomicLine& l, double w, const PhysicalConstants& k) {
  const double c2 = k.speed_of_light * k.speed_of_light;
  return -l.weight * 3.0 * std::numbers::pi * c2 / (2.0 * std::pow(l.omega0, 3)) *
         (l.linewidth / (l.omega0 - w) + l.linewidth / (l.omega0 + w));
}

}  // namespace

AtomicLines ytterbium171_lines() {
  const PhysicalConstants k;
  AtomicLines out;
  out.lines.push_back({"D1", wavelength_to_omega(nm_to_m(369.5), k), mhz_to_angular(19.6), 1.0 / 3.0});
  out.lines.push_back({"D2", wavelength_to_omega(nm_to_m(328.9), k), mhz_to_angular(25.8), 2.0 / 3.0});
  out.hyperfine_splitting = kTwoPi * 12.6e9;
  return out;
}

AtomicLines load_atomic_lines(const std::filesystem::path& path, double hyperfine_splitting) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open " + path.string());
  const PhysicalConstants k;
  AtomicLines out;
  out.hyperfine_splitting = hyperfine_splitting;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string label;
    if (!(ss >> label)) continue;
    double nm = 0.0, mhz = 0.0, weight = 1.0;
    if (!(ss >> nm >> mhz))
      fail(ErrorCode::InvalidArgument,
           path.string() + ":" + std::to_string(lineno) + ": expected 'label wavelength_nm linewidth_MHz [weight]'");
    if (!(ss >> weight)) weight = 1.0;
    require(nm > 0.0 && mhz > 0.0, path.string() + ":" + std::to_string(lineno) + ": values must be positive");
    out.lines.push_back({label, wavelength_to_omega(nm_to_m(nm), k), mhz_to_angular(mhz), weight});
  }
  validate(out);
  return out;
}

double peak_intensity(const TweezerBeam& beam) {
  validate(beam);
  return 2.0 * beam.power / (std::numbers::pi * beam.waist * beam.waist);
}

double dipole_potential(const TweezerBeam& beam, const AtomicLines& lines, const PhysicalConstants& k) {
  const double w = beam_omega(beam, lines, k);
  double u = 0.0;
  for (const auto& l : lines.lines) u += line_shift(l, w, k);
  return u * peak_intensity(beam);
}

double scattering_rate(const TweezerBeam& beam, const AtomicLines& lines, const PhysicalConstants& k) {
  const double w = beam_omega(beam, lines, k);
  const double c2 = k.speed_of_light * k.speed_of_light;
  double rate = 0.0;
  for (const auto& l : lines.lines) {
    const double amp = l.linewidth / (l.omega0 - w) + l.linewidth / (l.omega0 + w);
    rate += l.weight * 3.0 * c2 / (k.hbar * std::pow(l.omega0, 3)) * std::pow(w / l.omega0, 3) * amp * amp;
  }
  return rate * beam.power / (beam.waist * beam.waist);
}

double tweezer_curvature(const TweezerBeam& beam, const AtomicLines& lines, const SpeciesConstants& species) {
  validate(species);
  return -4.0 * dipole_potential(beam, lines, species.constants) / (species.mass * beam.waist * beam.waist);
}

double tweezer_trap_frequency(const TweezerBeam& beam, const AtomicLines& lines, const SpeciesConstants& species) {
  return std::sqrt(std::abs(tweezer_curvature(beam, lines, species)));
}

double differential_stark_shift(const TweezerBeam& beam, const AtomicLines& lines, const PhysicalConstants& k) {
  const double w = beam_omega(beam, lines, k);
  const double intensity = peak_intensity(beam);
  double shift = 0.0;
  for (const auto& l : lines.lines) {
    const double delta = l.omega0 - w;
    const double sigma = l.omega0 + w;
    const double inv_eff = (1.0 / (delta * delta) + 1.0 / (sigma * sigma)) / (1.0 / delta + 1.0 / sigma);
    shift += line_shift(l, w, k) * intensity / k.hbar * lines.hyperfine_splitting * inv_eff;
  }
  return shift;
}

std::vector<TweezerBeam> stark_homogenize(std::span<const double> desired, const TweezerBeam& reference,
                                          const AtomicLines& lines, const SpeciesConstants& species) {
  const double omega_ref = tweezer_trap_frequency(reference, lines, species);
  std::vector<TweezerBeam> out;
  out.reserve(desired.size());
  for (std::size_t i = 0; i < desired.size(); ++i) {
    if (!(desired[i] > 0.0))
      fail(ErrorCode::Unsupported, "stark_homogenize: ion " + std::to_string(i) +
                                       " requests no confinement; exclude unpinned ions");
    TweezerBeam b = reference;
    b.waist = reference.waist * omega_ref / desired[i];
    b.power = reference.power * (b.waist / reference.waist) * (b.waist / reference.waist);
    out.push_back(b);
  }
  return out;
}

double configuration_epsilon(const IonCrystal& crystal, const TweezerPattern& tweezers, const DriveConfig& drive,
                             const CouplingMatrix& target) {
  const ModeSpectrum s = mode_spectrum(build_hessian(crystal, tweezers));
  return coupling_error(target, coupling_matrix(s, drive, crystal.species)).epsilon;
}

MisalignmentScan misalignment_scan(const OptimizationResult& result, const MisalignmentOptions& options) {
  require(options.samples >= 0, "misalignment: sample count must be non-negative");
  require(options.scale_min >= 0.0 && options.scale_min <= options.scale_max,
          "misalignment: need 0 <= scale_min <= scale_max");
  require(options.scale_min > 0.0 || options.scale_max == 0.0,
          "misalignment: log-uniform scales need scale_min > 0 unless both are zero");
  const IonCrystal& base = result.crystal;
  const int n = base.ion_count();
  {
    const auto pe = potential_and_gradient(base.positions, base.trap, base.species);
    const double ell = base.length_scale();
    const double wbar = base.trap.mean_frequency();
    const double force = pe.gradient.norm() / (base.species.mass * wbar * wbar * ell);
    if (force > 1e-6)
      fail(ErrorCode::Validity, "misalignment: result crystal is not a trap equilibrium (idealized geometry)");
  }
  const AxisSet axes = options.axes.empty() ? result.pin_axes : options.axes;
  const std::vector<int> dims = axes.indices();
  const int d = static_cast<int>(dims.size());
  require(d > 0, "misalignment: no offset axes");

  TweezerPattern centered = result.tweezers;
  centered.offsets.assign(std::size_t(n), Eigen::Vector3d::Zero());
  centered.anchors = base.positions;

  MisalignmentScan scan;
  scan.aligned_epsilon = configuration_epsilon(base, centered, result.drive, result.target);
  scan.samples.resize(std::size_t(options.samples));
  detail::parallel_for(options.samples, options.threads, [&](int s) {
    CounterRng rng(options.seed, std::uint64_t(s));
    MisalignmentSample& out = scan.samples[std::size_t(s)];
    out.scale = options.scale_min == options.scale_max
                    ? options.scale_min
                    : options.scale_min * std::pow(options.scale_max / options.scale_min, rng.uniform());
    TweezerPattern p = centered;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd dir(d);
      for (int k = 0; k < d; ++k) dir[k] = rng.normal();
      const double radius = out.scale * std::pow(rng.uniform(), 1.0 / d);
      dir *= dir.norm() > 0.0 ? radius / dir.norm() : 0.0;
      Eigen::Vector3d off = Eigen::Vector3d::Zero();
      for (int k = 0; k < d; ++k) off[dims[std::size_t(k)]] = dir[k];
      p.offsets[std::size_t(i)] = off;
      total += off.norm();
    }
    out.mean_offset = total / n;
    try {
      const IonCrystal shifted = solve_equilibrium(base.trap, base.species, base.positions, &p);
      out.epsilon = configuration_epsilon(shifted, p, result.drive, result.target);
    } catch (const Error&) {
      out.converged = false;
      out.epsilon = std::numeric_limits<double>::quiet_NaN();
    }
  });
  for (const auto& s : scan.samples) scan.excluded += s.converged ? 0 : 1;
  return scan;
}

}  // namespace tweezer
