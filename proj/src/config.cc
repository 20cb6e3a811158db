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

#include "rcest/config.h"

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <set>
#include <stdexcept>
#include <type_traits>

#include "rcest/errors.h"

namespace rcest {

TextPosition locate(const std::string& text, std::size_t byte_offset) {
    TextPosition pos;
    const std::size_t end = std::min(byte_offset, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++pos.line;
            pos.column = 1;
        } else {
            ++pos.column;
        }
    }
    return pos;
}

namespace {

// Reads keys from one JSON object and rejects the ones nobody asked for.
class Section {
  public:
    Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const Json& child(const std::string& key) {
        used_.insert(key);
        return j_.at(key);
    }

    template <typename T>
    void read(const std::string& key, T& out) {
        if (!has(key)) return;
        const Json& v = child(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) fail_key(key, "must be a boolean");
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_unsigned()) fail_key(key, "must be a non-negative integer");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) fail_key(key, "must be an integer");
            const auto wide = v.get<std::int64_t>();
            if (wide < std::numeric_limits<T>::min() || wide > std::numeric_limits<T>::max()) {
                fail_key(key, "is out of range");
            }
        }
        try {
            out = v.get<T>();
        } catch (const Json::exception&) {
            fail_key(key, "has the wrong type");
        }
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const Json& v = child(key);
        if (!v.is_number()) fail_key(key, "must be a number");
        return v.get<double>();
    }

    double required_number(const std::string& key) {
        if (!has(key)) fail("missing required key '" + key + "'");
        return number(key, 0.0);
    }

    std::string path(const std::string& key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) fail("unknown key '" + key + "'");
        }
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("config " + path_ + ": " + msg);
    }
    [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
        throw ConfigError("config " + path(key) + ": " + msg);
    }

  private:
    const Json& j_;
    std::string path_;
    std::set<std::string> used_;
};

ResonanceMode mode_from(const Json& j, const std::string& path) {
    Section s(j, path);
    ResonanceMode m;
    m.f_rm = s.required_number("f_rm_hz");
    m.g = s.required_number("g_hz");
    s.finish();
    return m;
}

Environment environment_from(const Json& j, const std::string& path) {
    Section s(j, path);
    Environment env;
    if (s.has("modes")) {
        const Json& modes = s.child("modes");
        if (!modes.is_array()) s.fail_key("modes", "must be an array");
        for (std::size_t i = 0; i < modes.size(); ++i) {
            env.modes.push_back(mode_from(modes[i], s.path("modes[" + std::to_string(i) + "]")));
        }
    }
    if (s.has("t1_s")) {
        const Json& v = s.child("t1_s");
        if (v.is_null()) {
            env.t1 = INFINITY;
        } else if (v.is_number()) {
            env.t1 = v.get<double>();
        } else {
            s.fail_key("t1_s", "must be a number or null (no relaxation)");
        }
    }
    env.vis_floor = s.number("vis_floor", env.vis_floor);
    env.vis_ceiling = s.number("vis_ceiling", env.vis_ceiling);
    env.f_min = s.required_number("f_min_hz");
    env.f_max = s.required_number("f_max_hz");
    s.finish();
    return env;
}

template <typename E>
E enum_from(Section& s, const std::string& key, E fallback,
            std::initializer_list<std::pair<const char*, E>> names) {
    if (!s.has(key)) return fallback;
    const Json& v = s.child(key);
    if (v.is_string()) {
        for (const auto& [name, value] : names) {
            if (v.get<std::string>() == name) return value;
        }
    }
    std::string allowed;
    for (const auto& [name, value] : names) allowed += std::string(allowed.empty() ? "" : ", ") + name;
    s.fail_key(key, "must be one of: " + allowed);
}

void check(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
}

template <typename F>
void rethrow_as_config(const std::string& where, F&& f) {
    try {
        f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config " + where + ": " + e.what());
    }
}

}  // namespace

Environment environment_from_json(const Json& j) { return environment_from(j, "environment"); }

RunConfig parse_config(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto pos = locate(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ConfigError("config: malformed JSON at line " + std::to_string(pos.line) +
                          ", column " + std::to_string(pos.column) + ": " + e.what());
    }

    Section top(root, "$");
    RunConfig cfg;
    top.read("schema_version", cfg.schema_version);
    if (cfg.schema_version != kSchemaVersion) {
        top.fail_key("schema_version", "unsupported version " + std::to_string(cfg.schema_version));
    }
    top.read("seed", cfg.seed);
    if (top.has("output_dir")) {
        std::string dir;
        top.read("output_dir", dir);
        cfg.output_dir = dir;
    }

    if (!top.has("environment")) top.fail("missing required key 'environment'");
    cfg.environment = environment_from(top.child("environment"), "$.environment");
    const Environment& env = cfg.environment;

    cfg.octave.f_min = env.f_min;
    cfg.octave.f_max = env.f_max;
    if (top.has("octave")) {
        Section s(top.child("octave"), "$.octave");
        cfg.octave.f_min = s.number("f_min_hz", cfg.octave.f_min);
        cfg.octave.f_max = s.number("f_max_hz", cfg.octave.f_max);
        s.read("final_octave", cfg.octave.final_octave);
        s.read("samples_per_bin", cfg.octave.samples_per_bin);
        s.read("shots", cfg.octave.shots);
        cfg.octave.sampling = enum_from(s, "sampling", cfg.octave.sampling,
                                        {{"random", BinSampling::kRandom},
                                         {"regular", BinSampling::kRegular}});
        s.finish();
    }

    // Grid defaults: the octave scan's final resolution and time window.
    {
        const double span = cfg.octave.span();
        const int of = std::clamp(cfg.octave.final_octave, 0, 30);
        const double g_final = span > 0.0 ? octave_coupling(span, of) : 1.0;
        const double t_hi = 1.0 / (2.0 * g_final);
        cfg.grid.f_range = AxisRange{cfg.octave.f_min, cfg.octave.f_max, 2.0 * g_final};
        cfg.grid.t_range = AxisRange{0.0, t_hi, t_hi / 100.0};
        cfg.grid.shots = cfg.octave.shots;
    }
    if (top.has("grid")) {
        Section s(top.child("grid"), "$.grid");
        auto& g = cfg.grid;
        g.f_range.lo = s.number("f_min_hz", g.f_range.lo);
        g.f_range.hi = s.number("f_max_hz", g.f_range.hi);
        g.f_range.step = s.number("df_hz", g.f_range.step);
        g.t_range.lo = s.number("t_min_s", g.t_range.lo);
        g.t_range.hi = s.number("t_max_s", g.t_range.hi);
        g.t_range.step = s.number("dt_s", g.t_range.step);
        s.read("shots", g.shots);
        s.finish();
    }

    cfg.heuristic.t_max = std::isfinite(env.t1) ? env.t1 / 10.0 : NAN;
    if (top.has("heuristic")) {
        Section s(top.child("heuristic"), "$.heuristic");
        auto& h = cfg.heuristic;
        h.tanh_scale = s.number("tanh_scale", h.tanh_scale);
        h.c = s.number("c", h.c);
        s.read("m0", h.m0);
        h.t_max = s.number("t_max_s", h.t_max);
        s.read("shots", h.shots);
        s.finish();
    }
    if (!std::isfinite(cfg.heuristic.t_max)) {
        throw ConfigError("config $.heuristic.t_max_s: required when environment.t1_s is null");
    }

    if (top.has("detection")) {
        Section s(top.child("detection"), "$.detection");
        cfg.detection.buffer = s.number("buffer", cfg.detection.buffer);
        cfg.detection.prior = enum_from(s, "coupling_prior", cfg.detection.prior,
                                        {{"octave_range", CouplingPrior::kOctaveRange},
                                         {"bin_width", CouplingPrior::kBinWidth}});
        s.finish();
    }

    if (top.has("estimation")) {
        Section s(top.child("estimation"), "$.estimation");
        auto& e = cfg.estimation;
        s.read("particles", e.n_particles);
        s.read("iterations", e.options.iterations);
        e.options.shrink = s.number("shrink", e.options.shrink);
        s.read("early_stop", e.options.early_stop.enabled);
        e.options.early_stop.sigma_f =
            s.number("early_stop_sigma_f_hz", e.options.early_stop.sigma_f);
        e.options.early_stop.sigma_g =
            s.number("early_stop_sigma_g_hz", e.options.early_stop.sigma_g);
        s.finish();
    }

    if (top.has("batch")) {
        Section s(top.child("batch"), "$.batch");
        BatchSection b;
        s.read("runs", b.runs);
        if (s.has("truth")) {
            b.truth = mode_from(s.child("truth"), "$.batch.truth");
        } else if (env.modes.size() == 1) {
            b.truth = env.modes.front();
        } else {
            s.fail("missing 'truth' (required unless the environment has exactly one mode)");
        }
        if (s.has("recipe")) {
            Section r(s.child("recipe"), "$.batch.recipe");
            b.recipe.f_window = r.number("f_window_hz", b.recipe.f_window);
            b.recipe.g_window = r.number("g_window_hz", b.recipe.g_window);
            b.recipe.f_width = r.number("f_width_hz", b.recipe.f_width);
            b.recipe.g_width = r.number("g_width_hz", b.recipe.g_width);
            r.finish();
        }
        b.success.f_tol = s.number("f_tol_hz", b.success.f_tol);
        b.success.g_tol = s.number("g_tol_hz", b.success.g_tol);
        s.read("threads", b.threads);
        s.read("histogram_bins", b.histogram_bins);
        s.finish();
        cfg.batch = b;
    }
    top.finish();
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    rethrow_as_config("$.environment", [&] { environment.validate(); });
    rethrow_as_config("$.octave", [&] { octave.validate(); });
    rethrow_as_config("$.heuristic", [&] { heuristic.validate(); });
    check(grid.f_range.step > 0.0 && grid.t_range.step > 0.0, "grid steps must be positive");
    check(grid.f_range.hi >= grid.f_range.lo && grid.t_range.hi >= grid.t_range.lo,
          "grid ranges must be non-empty");
    check(grid.t_range.lo >= 0.0, "grid times must be >= 0");
    check(grid.shots >= 1, "grid shots must be >= 1");
    check(detection.buffer >= 0.0 && detection.buffer < 1.0, "detection buffer must be in [0, 1)");
    check(estimation.n_particles >= 1, "estimation particles must be >= 1");
    check(estimation.options.iterations >= 0, "estimation iterations must be >= 0");
    check(estimation.options.shrink > 0.0 && estimation.options.shrink <= 1.0,
          "estimation shrink must be in (0, 1]");
    if (batch) {
        check(batch->runs >= 1, "batch runs must be >= 1");
        rethrow_as_config("$.batch.truth", [&] { batch->truth.validate(); });
        check(batch->threads >= 1, "batch threads must be >= 1");
        check(batch->histogram_bins >= 1, "batch histogram_bins must be >= 1");
        check(batch->recipe.f_width >= 0.0 && batch->recipe.g_width >= 0.0 &&
                  batch->recipe.f_window >= 0.0 && batch->recipe.g_window >= 0.0,
              "batch recipe sizes must be >= 0");
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::runtime_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config(text);
}

Json to_json(const ResonanceMode& mode) {
    return Json{{"f_rm_hz", mode.f_rm}, {"g_hz", mode.g}};
}

Json to_json(const Environment& env) {
    Json modes = Json::array();
    for (const auto& m : env.modes) modes.push_back(to_json(m));
    return Json{{"modes", std::move(modes)},
                {"t1_s", std::isfinite(env.t1) ? Json(env.t1) : Json(nullptr)},
                {"vis_floor", env.vis_floor},
                {"vis_ceiling", env.vis_ceiling},
                {"f_min_hz", env.f_min},
                {"f_max_hz", env.f_max}};
}

Json to_json(const RunConfig& c) {
    Json j;
    j["schema_version"] = c.schema_version;
    j["seed"] = c.seed;
    if (c.output_dir) j["output_dir"] = *c.output_dir;
    j["environment"] = to_json(c.environment);
    j["octave"] = Json{{"f_min_hz", c.octave.f_min},
                       {"f_max_hz", c.octave.f_max},
                       {"final_octave", c.octave.final_octave},
                       {"samples_per_bin", c.octave.samples_per_bin},
                       {"shots", c.octave.shots},
                       {"sampling",
                        c.octave.sampling == BinSampling::kRandom ? "random" : "regular"}};
    j["grid"] = Json{{"f_min_hz", c.grid.f_range.lo}, {"f_max_hz", c.grid.f_range.hi},
                     {"df_hz", c.grid.f_range.step},  {"t_min_s", c.grid.t_range.lo},
                     {"t_max_s", c.grid.t_range.hi},  {"dt_s", c.grid.t_range.step},
                     {"shots", c.grid.shots}};
    j["heuristic"] = Json{{"tanh_scale", c.heuristic.tanh_scale},
                          {"c", c.heuristic.c},
                          {"m0", c.heuristic.m0},
                          {"t_max_s", c.heuristic.t_max},
                          {"shots", c.heuristic.shots}};
    j["detection"] = Json{{"buffer", c.detection.buffer},
                          {"coupling_prior", c.detection.prior == CouplingPrior::kOctaveRange
                                                 ? "octave_range"
                                                 : "bin_width"}};
    const auto& e = c.estimation;
    j["estimation"] = Json{{"particles", e.n_particles},
                           {"iterations", e.options.iterations},
                           {"shrink", e.options.shrink},
                           {"early_stop", e.options.early_stop.enabled},
                           {"early_stop_sigma_f_hz", e.options.early_stop.sigma_f},
                           {"early_stop_sigma_g_hz", e.options.early_stop.sigma_g}};
    if (c.batch) {
        const auto& b = *c.batch;
        j["batch"] = Json{{"runs", b.runs},
                          {"truth", to_json(b.truth)},
                          {"recipe", Json{{"f_window_hz", b.recipe.f_window},
                                          {"g_window_hz", b.recipe.g_window},
                                          {"f_width_hz", b.recipe.f_width},
                                          {"g_width_hz", b.recipe.g_width}}},
                          {"f_tol_hz", b.success.f_tol},
                          {"g_tol_hz", b.success.g_tol},
                          {"threads", b.threads},
                          {"histogram_bins", b.histogram_bins}};
    }
    return j;
}

}  // namespace rcest
