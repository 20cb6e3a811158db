// Copyright 2026 The rcest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rcest/io.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcest {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_grid_csv(std::ostream& out, const GridScan& scan) {
    out << "f_p_hz,t_s,shots,n_e,p_e\n";
    for (const auto& r : scan.records) {
        out << format_double(r.setting.f_p) << ',' << format_double(r.setting.t) << ','
            << r.setting.shots << ',' << r.n_e << ',' << format_double(r.p_e()) << '\n';
    }
}

Json to_json(const MeasurementRecord& record) {
    return Json{{"f_p_hz", record.setting.f_p},
                {"t_s", record.setting.t},
                {"shots", record.setting.shots},
                {"n_e", record.n_e},
                {"p_e", record.p_e()}};
}

Json to_json(const OctaveScan& scan) {
    const auto& c = scan.config;
    Json j;
    j["config"] = Json{{"f_min_hz", c.f_min},
                       {"f_max_hz", c.f_max},
                       {"final_octave", c.final_octave},
                       {"samples_per_bin", c.samples_per_bin},
                       {"shots", c.shots},
                       {"seed", c.seed},
                       {"sampling", c.sampling == BinSampling::kRandom ? "random" : "regular"}};
    Json bins = Json::array();
    for (const auto& b : scan.bins) {
        Json records = Json::array();
        for (const auto& r : b.records) records.push_back(to_json(r));
        bins.push_back(Json{{"octave", b.octave},
                            {"k", b.k},
                            {"g_o_hz", b.g_o},
                            {"f_lo_hz", b.f_lo},
                            {"f_hi_hz", b.f_hi},
                            {"t_lo_s", b.t_lo},
                            {"t_hi_s", b.t_hi},
                            {"p_bar", b.p_bar},
                            {"records", std::move(records)}});
    }
    j["bins"] = std::move(bins);
    return j;
}

void write_octave_csv(std::ostream& out, const OctaveScan& scan) {
    out << "octave,k,f_lo_hz,f_hi_hz,t_lo_s,t_hi_s,p_bar\n";
    for (const auto& b : scan.bins) {
        out << b.octave << ',' << b.k << ',' << format_double(b.f_lo) << ','
            << format_double(b.f_hi) << ',' << format_double(b.t_lo) << ','
            << format_double(b.t_hi) << ',' << format_double(b.p_bar) << '\n';
    }
}

Json to_json(const Threshold& threshold) {
    return Json{{"p_t", threshold.p_t},
                {"max_pbar", threshold.max_pbar},
                {"buffer", threshold.buffer}};
}

Json to_json(const Peak& peak) {
    return Json{{"octave", peak.octave},     {"k", peak.k},
                {"f_lo_hz", peak.f_lo},      {"f_hi_hz", peak.f_hi},
                {"center_hz", peak.center()}, {"p_bar", peak.p_bar},
                {"g_lo_hz", peak.g_lo()},    {"g_hi_hz", peak.g_hi()}};
}

Json peaks_to_json(std::span<const Peak> peaks) {
    Json j = Json::array();
    for (const auto& p : peaks) j.push_back(to_json(p));
    return j;
}

Json to_json(const SubScan& subscan) {
    Json bins = Json::array();
    for (const auto& b : subscan.bins) {
        bins.push_back(Json{{"octave", b.octave},
                            {"k", b.k},
                            {"g_o_hz", b.g_o},
                            {"f_lo_hz", b.f_lo},
                            {"f_hi_hz", b.f_hi},
                            {"full_width_hz", b.full_width},
                            {"proportion", b.proportion},
                            {"p_bar", b.p_bar},
                            {"is_peak", b.is_peak}});
    }
    return Json{{"f_lo_hz", subscan.f_lo},
                {"f_hi_hz", subscan.f_hi},
                {"peak", to_json(subscan.peak)},
                {"bins", std::move(bins)}};
}

Json subscans_to_json(std::span<const SubScan> subscans) {
    Json j = Json::array();
    for (const auto& s : subscans) j.push_back(to_json(s));
    return j;
}

Json to_json(const Moments& m) {
    return Json{{"mu_f_hz", m.mu_f},
                {"sigma_f_hz", m.sigma_f},
                {"mu_g_hz", m.mu_g},
                {"sigma_g_hz", m.sigma_g}};
}

void write_particles_csv(std::ostream& out, const ParticleDistribution& dist) {
    out << "f_rm_hz,g_hz\n";
    for (const auto& p : dist.particles) {
        out << format_double(p.f_rm) << ',' << format_double(p.g) << '\n';
    }
}

void write_trace_csv(std::ostream& out, std::span<const TraceStep> trace) {
    out << "iter,f_p_hz,t_s,n_e,mu_f_hz,sigma_f_hz,mu_g_hz,sigma_g_hz\n";
    for (const auto& s : trace) {
        out << s.iteration << ',' << format_double(s.setting.f_p) << ','
            << format_double(s.setting.t) << ',' << s.record.n_e << ','
            << format_double(s.moments.mu_f) << ',' << format_double(s.moments.sigma_f) << ','
            << format_double(s.moments.mu_g) << ',' << format_double(s.moments.sigma_g) << '\n';
    }
}

Json to_json(const Histogram& h) {
    return Json{{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}};
}

Json to_json(const BatchStats& stats) {
    return Json{{"truth", Json{{"f_rm_hz", stats.truth.f_rm}, {"g_hz", stats.truth.g}}},
                {"n_runs", stats.n_runs},
                {"successes", stats.successes},
                {"success_fraction", stats.success_fraction},
                {"rejected", stats.rejected},
                {"g_multiple_outliers", stats.g_multiple_outliers},
                {"f_hat_histogram_hz", to_json(stats.f_hist)},
                {"g_hat_histogram_hz", to_json(stats.g_hist)}};
}

void write_batch_runs_csv(std::ostream& out, const BatchStats& stats) {
    out << "f_hat_hz,g_hat_hz,converged\n";
    for (const auto& r : stats.runs) {
        out << format_double(r.estimate.mu_f) << ',' << format_double(r.estimate.mu_g) << ','
            << (r.converged ? 1 : 0) << '\n';
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace rcest
