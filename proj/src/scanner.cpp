#include "ptqm/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include "ptqm/analysis.hpp"
#include "ptqm/errors.hpp"

namespace ptqm {

bool ScanSample::all_real() const {
  return std::all_of(classification.begin(), classification.end(),
                     [](Classification c) { return c == Classification::real; });
}

ScanSample scan_sample(const ScanRequest& req, double lambda) {
  SpectrumRequest sr{req.potential.with_lambda(lambda), req.grid, req.state_count, req.tol};
  const auto states = continue_spectrum(sr);
  ScanSample s;
  s.lambda = lambda;
  // Only the requested count; a trailing partner is kept by continue_spectrum
  // and stays in the summary.
  for (const auto& st : states) {
    s.energies.push_back(st.energy);
    s.classification.push_back(st.classification);
    s.partner.push_back(st.partner);
    const double norm = std::real(overlap(st, st, OverlapMode::hermitian));
    s.abs_pt_norm.push_back(std::abs(overlap(st, st, OverlapMode::pt_general)) / norm);
  }
  return s;
}

namespace {

void fill_pairing(const ScanRequest& req, ScanResult& r) {
  SpectrumRequest sr{req.potential.with_lambda(r.bracket_hi), req.grid, req.state_count, req.tol};
  const auto states = continue_spectrum(sr);
  for (std::size_t a = 0; a < states.size(); ++a) {
    const auto& sa = states[a];
    for (std::size_t b = 0; b < states.size(); ++b) {
      const auto& sb = states[b];
      const double scale = std::max({1.0, std::abs(sa.energy), std::abs(sb.energy)});
      const double v =
          std::abs((std::conj(sa.energy) - sb.energy) * overlap(sa, sb, OverlapMode::pt_general)) /
          scale;
      r.general_orthogonality = std::max(r.general_orthogonality, v);
    }
    if (!sa.partner || *sa.partner <= static_cast<int>(a)) continue;
    const auto& sb = states[static_cast<std::size_t>(*sa.partner)];
    PairingEntry e;
    e.a = static_cast<int>(a);
    e.b = *sa.partner;
    e.energy_a = sa.energy;
    e.energy_b = sb.energy;
    e.mismatch = std::abs(sa.energy - std::conj(sb.energy)) / std::max(1.0, std::abs(sa.energy));
    auto self = [](const EigenState& s) {
      return std::abs(overlap(s, s, OverlapMode::pt_general)) /
             std::real(overlap(s, s, OverlapMode::hermitian));
    };
    e.self_overlap_a = self(sa);
    e.self_overlap_b = self(sb);
    r.pairing.push_back(e);
  }
}

}  // namespace

ScanResult scan_lambda(const ScanRequest& req) {
  if (!(req.step > 0.0)) throw ConfigError("scan step must be positive");
  if (!(req.lambda_end > req.lambda_start))
    throw ConfigError("scan range must satisfy start < end");
  const std::size_t count =
      static_cast<std::size_t>(std::floor((req.lambda_end - req.lambda_start) / req.step + 1e-9)) + 1;

  ScanResult r;
  r.potential = req.potential.name;
  r.state_count = req.state_count;
  r.step = req.step;
  r.samples.resize(count);

  unsigned workers = req.threads ? req.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  // Each worker takes every `workers`-th sample; results land by index.
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < count; i += workers)
        r.samples[i] = scan_sample(req, req.lambda_start + static_cast<double>(i) * req.step);
    }));
  }
  for (auto& j : jobs) j.get();

  if (!r.samples.front().all_real()) {
    std::ostringstream msg;
    msg << "scan start lambda = " << req.lambda_start << " already has a broken spectrum";
    throw ConfigError(msg.str());
  }
  std::size_t first_broken = count;
  for (std::size_t i = 0; i < count; ++i)
    if (!r.samples[i].all_real()) {
      first_broken = i;
      break;
    }
  if (first_broken == count) return r;

  r.threshold_found = true;
  r.bracket_lo = r.samples[first_broken - 1].lambda;
  r.bracket_hi = r.samples[first_broken].lambda;
  const double width = req.step / 32.0;
  while (r.bracket_hi - r.bracket_lo > width * (1.0 + 1e-9)) {
    const double mid = 0.5 * (r.bracket_lo + r.bracket_hi);
    auto s = scan_sample(req, mid);
    s.refinement = true;
    if (s.all_real())
      r.bracket_lo = mid;
    else
      r.bracket_hi = mid;
    r.samples.push_back(std::move(s));
  }
  std::sort(r.samples.begin(), r.samples.end(),
            [](const ScanSample& a, const ScanSample& b) { return a.lambda < b.lambda; });
  fill_pairing(req, r);
  return r;
}

std::vector<NormTrajectory> self_orthogonality_report(const ScanResult& result) {
  if (!result.threshold_found) throw ConfigError("scan found no threshold; nothing to report");
  const auto at = [&](double lambda) -> const ScanSample& {
    for (const auto& s : result.samples)
      if (s.lambda == lambda) return s;
    throw ConfigError("scan result lacks the bracket sample");
  };
  const ScanSample& hi = at(result.bracket_hi);
  const ScanSample& start = result.samples.front();

  std::vector<int> coalescing;
  for (std::size_t i = 0; i < hi.energies.size(); ++i)
    if (hi.classification[i] == Classification::conjugate_pair) coalescing.push_back(static_cast<int>(i));

  std::vector<NormTrajectory> out;
  const double window = result.step * (1.0 + 1e-9);
  for (int k : coalescing) {
    NormTrajectory t;
    t.state = k;
    const auto idx = static_cast<std::size_t>(k);
    t.start_value = idx < start.abs_pt_norm.size() ? start.abs_pt_norm[idx] : 0.0;
    t.bracket_value = hi.abs_pt_norm[idx];
    t.ratio = t.start_value > 0.0 ? t.bracket_value / t.start_value : 0.0;
    for (const auto& s : result.samples) {
      if (s.lambda > result.bracket_lo) break;
      if (s.lambda >= result.bracket_lo - window && idx < s.abs_pt_norm.size())
        t.approach.emplace_back(s.lambda, s.abs_pt_norm[idx]);
    }
    t.monotone = true;
    for (std::size_t i = 1; i < t.approach.size(); ++i)
      if (t.approach[i].second > t.approach[i - 1].second * (1.0 + 1e-9)) t.monotone = false;
    if (!t.monotone) t.warning = "non-monotone PT-norm trajectory near threshold; try a finer step";
    t.vanishes = t.ratio < 1e-3;
    t.self_orthogonal = t.bracket_value <= 1e-4;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace ptqm
