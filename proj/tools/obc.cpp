// Command-line front end: simulate, itineraries, singular, certify,
// attractors, basins, transversality. All structured output is JSON (or
// CSV/PPM/SVG where a format is requested) and deterministic for fixed
// flags, seeds and thread counts.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "obc/basins.hpp"
#include "obc/certification.hpp"
#include "obc/dynamics.hpp"
#include "obc/geometry.hpp"
#include "obc/io.hpp"
#include "obc/symbolic.hpp"
#include "obc/transversality.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kGridNote =
    "transversality hypothesis checked on a finite grid only; delta is empirical, not certified";

struct StrictInconclusive : std::runtime_error {
    StrictInconclusive() : std::runtime_error("certification inconclusive (--strict)") {}
};

void emit(const json& doc, const std::string& json_path) {
    const std::string text = doc.dump(2) + "\n";
    std::cout << text;
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw obc::io_error("cannot open " + json_path + " for writing");
        out << text;
    }
}

json point_json(obc::Point z) { return json::array({z.real(), z.imag()}); }

json attractor_json(const obc::PeriodicAttractor& attr) {
    json itin = json::array();
    for (const std::uint8_t s : attr.itinerary) itin.push_back(static_cast<int>(s));
    return json{{"period", attr.period},
                {"itinerary", itin},
                {"point", point_json(attr.point)},
                {"verified", attr.verified},
                {"drift", attr.drift}};
}

obc::Point parse_point(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw obc::domain_error("ParameterOutOfRange", "expected X,Y but got " + text);
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

struct CommonArgs {
    std::string polygon_path;
    double lambda = 0.5;
    int threads = 0;
    std::string json_path;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_lambda = true) {
    cmd->add_option("--polygon", args.polygon_path, "polygon file, one 'x y' vertex per line")->required();
    if (with_lambda) cmd->add_option("--lambda", args.lambda, "contraction factor in (0,1)")->required();
    cmd->add_option("--threads", args.threads, "worker threads (default: OBC_THREADS or hardware)");
    cmd->add_option("--json", args.json_path, "also write the JSON report to this file");
}

obc::MapParams load_params(const CommonArgs& args) {
    return obc::MapParams(obc::read_polygon(args.polygon_path), args.lambda);
}

int run_simulate(const CommonArgs& args, const std::string& point_text, int steps, const std::string& csv_path) {
    const obc::MapParams params = load_params(args);
    const obc::Point z0 = parse_point(point_text);
    const obc::OrbitResult orb = obc::orbit(params, z0, steps);

    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw obc::io_error("cannot open " + csv_path + " for writing");
        csv << "step,x,y,cone_index\n";
        for (std::size_t i = 0; i < orb.points.size(); ++i) {
            int cone = 0;
            if (i < orb.itinerary.size()) {
                cone = orb.itinerary[i];
            } else {
                const obc::ConeQuery q = obc::cone_index(params.polygon, orb.points[i]);
                cone = q.kind == obc::ConeQuery::Kind::Cone ? q.index : 0;
            }
            csv << i << "," << obc::dtos(orb.points[i].real()) << "," << obc::dtos(orb.points[i].imag()) << ","
                << cone << "\n";
        }
    }

    const char* status = orb.status == obc::OrbitResult::Status::Completed ? "Completed"
                         : orb.status == obc::OrbitResult::Status::SingularHit ? "SingularHit"
                                                                               : "EnteredPolygonError";
    json itin = json::array();
    for (const std::uint8_t s : orb.itinerary) itin.push_back(static_cast<int>(s));
    emit(json{{"command", "simulate"},
              {"lambda", args.lambda},
              {"point", point_json(z0)},
              {"steps_requested", steps},
              {"steps_completed", orb.stop_step},
              {"status", status},
              {"final", point_json(orb.points.back())},
              {"itinerary", itin}},
         args.json_path);
    return 0;
}

int run_itineraries(const CommonArgs& args, int depth) {
    const obc::MapParams params = load_params(args);
    obc::SubdivisionOptions opts;
    opts.threads = obc::resolve_threads(args.threads);
    const obc::TrapRadii trap = obc::trap_radii(params, 0.0);
    const obc::ItineraryCounts counts = obc::itinerary_counts(params, depth, trap, opts);
    json doc{{"command", "itineraries"}, {"lambda", args.lambda}, {"depth", depth}};
    doc["counts"] = counts.kept;
    doc["counts_with_slivers"] = counts.with_slivers;
    doc["log_rate"] = counts.log_rate;
    doc["min_distinct_symbols"] = counts.min_distinct;
    if (counts.three_symbol_depth > 0) doc["three_symbol_depth"] = counts.three_symbol_depth;
    else doc["three_symbol_depth"] = nullptr;
    emit(doc, args.json_path);
    return 0;
}

int run_singular(const CommonArgs& args, int order, const std::string& svg_path) {
    const obc::MapParams params = load_params(args);
    obc::SubdivisionOptions opts;
    opts.threads = obc::resolve_threads(args.threads);
    const obc::TrapRadii trap = obc::trap_radii(params, 0.0);
    const auto segments = obc::singular_set_order_n(params, order, trap, opts);
    obc::write_singular_svg(segments, params.polygon, opts.clip_scale * trap.r, svg_path);
    emit(json{{"command", "singular"},
              {"lambda", args.lambda},
              {"order", order},
              {"segments", segments.size()},
              {"svg", svg_path}},
         args.json_path);
    return 0;
}

json certificate_json(const CommonArgs& args, const obc::CertificationResult& cert, const obc::TrapRadii& trap,
                      double safety, int max_depth) {
    json doc{{"command", "certify"},
             {"lambda", args.lambda},
             {"safety", safety},
             {"max_depth", max_depth},
             {"status", cert.status == obc::CertificationResult::Status::Certified ? "Certified" : "Inconclusive"},
             {"depth", cert.depth},
             {"min_distance", cert.min_distance},
             {"threshold", cert.threshold},
             {"margin", cert.margin},
             {"trap_radius", trap.r}};
    json attrs = json::array();
    for (const obc::PeriodicAttractor& a : cert.attractors) attrs.push_back(attractor_json(a));
    doc["attractor_count"] = cert.attractors.size();
    doc["attractors"] = attrs;
    doc["diagnostics"] = cert.diagnostics;
    return doc;
}

int run_certify(const CommonArgs& args, int max_depth, double safety, bool strict) {
    const obc::MapParams params = load_params(args);
    obc::SubdivisionOptions opts;
    opts.threads = obc::resolve_threads(args.threads);
    const obc::TrapRadii trap = obc::trap_radii(params, 0.0);
    const obc::CertificationResult cert = obc::certify(params, max_depth, safety, opts);
    emit(certificate_json(args, cert, trap, safety, max_depth), args.json_path);
    if (strict && cert.status != obc::CertificationResult::Status::Certified) throw StrictInconclusive();
    return 0;
}

int run_attractors(const CommonArgs& args, int depth, double tol) {
    const obc::MapParams params = load_params(args);
    obc::SubdivisionOptions opts;
    opts.threads = obc::resolve_threads(args.threads);
    const auto attractors = obc::enumerate_attractors(params, depth, tol, opts);
    json attrs = json::array();
    for (const obc::PeriodicAttractor& a : attractors) attrs.push_back(attractor_json(a));
    emit(json{{"command", "attractors"},
              {"lambda", args.lambda},
              {"depth", depth},
              {"attractor_count", attractors.size()},
              {"attractors", attrs}},
         args.json_path);
    return 0;
}

int run_basins(const CommonArgs& args, const std::string& res_text, const std::string& bbox_text,
               const std::string& out_path, const std::string& palette_path, int max_iter, double tol_opt,
               int max_depth, int depth_override, double safety) {
    const obc::MapParams params = load_params(args);
    obc::SubdivisionOptions opts;
    opts.threads = obc::resolve_threads(args.threads);
    const obc::TrapRadii trap = obc::trap_radii(params, 0.0);

    const auto x_pos = res_text.find('x');
    if (x_pos == std::string::npos)
        throw obc::domain_error("ParameterOutOfRange", "--res expects WxH, got " + res_text);
    const int width = std::stoi(res_text.substr(0, x_pos));
    const int height = std::stoi(res_text.substr(x_pos + 1));
    if (width <= 0 || height <= 0) throw obc::domain_error("ParameterOutOfRange", "resolution must be positive");

    std::vector<obc::PeriodicAttractor> attractors;
    json cert_info;
    if (depth_override > 0) {
        attractors = obc::enumerate_attractors(params, depth_override, 0.0, opts);
        cert_info = json{{"mode", "depth-override"}, {"depth", depth_override}};
    } else {
        const obc::CertificationResult cert = obc::certify(params, max_depth, safety, opts);
        if (cert.status != obc::CertificationResult::Status::Certified)
            throw obc::domain_error("Inconclusive",
                                    "certification failed up to depth " + std::to_string(max_depth) +
                                        "; rerun with a larger --max-depth or force --depth");
        attractors = cert.attractors;
        cert_info = json{{"mode", "certified"}, {"depth", cert.depth}, {"margin", cert.margin}};
    }

    obc::BBox bbox{-trap.r, -trap.r, trap.r, trap.r};
    if (!bbox_text.empty()) {
        double v[4];
        std::size_t pos = 0;
        for (int i = 0; i < 4; ++i) {
            const std::size_t comma = i < 3 ? bbox_text.find(',', pos) : bbox_text.size();
            if (comma == std::string::npos)
                throw obc::domain_error("ParameterOutOfRange", "--bbox expects x0,y0,x1,y1");
            v[i] = std::stod(bbox_text.substr(pos, comma - pos));
            pos = comma + 1;
        }
        bbox = {v[0], v[1], v[2], v[3]};
    }
    const double tol = tol_opt > 0.0 ? tol_opt : 1e-9 * std::max(1.0, trap.r);

    const obc::BasinRaster raster =
        obc::render_basins(params, attractors, bbox, width, height, max_iter, tol, opts.threads);
    const obc::Palette palette =
        palette_path.empty() ? obc::default_palette(static_cast<int>(attractors.size())) : obc::read_palette(palette_path);
    obc::write_ppm(raster, palette, out_path);

    std::map<std::int32_t, std::size_t> histogram;
    for (const std::int32_t label : raster.labels) ++histogram[label];
    json hist = json::object();
    for (const auto& [label, count] : histogram) hist[std::to_string(label)] = count;

    emit(json{{"command", "basins"},
              {"lambda", args.lambda},
              {"width", width},
              {"height", height},
              {"bbox", json::array({bbox.x0, bbox.y0, bbox.x1, bbox.y1})},
              {"max_iter", max_iter},
              {"tol", tol},
              {"certification", cert_info},
              {"attractor_count", attractors.size()},
              {"label_histogram", hist},
              {"out", out_path}},
         args.json_path);
    return 0;
}

int run_trans_bounds(double alpha, int kmax, const std::string& json_path) {
    json rows = json::array();
    for (int k = 0; k <= kmax; ++k) {
        const obc::RAlphaBounds b = obc::r_alpha_bounds(alpha, k);
        rows.push_back(json{{"k", k}, {"lower", b.lower}, {"upper", b.upper}});
    }
    emit(json{{"command", "transversality-bounds"}, {"alpha", alpha}, {"rows", rows}, {"note", kGridNote}}, json_path);
    return 0;
}

int run_trans_check(const std::string& poly_path, double delta, double eps, const std::string& interval_text, int k,
                    const std::string& json_path) {
    obc::BoundedPoly p;
    p.coefficients = obc::read_coefficients(poly_path);
    p.alpha = 0.0;
    for (std::size_t i = 1; i < p.coefficients.size(); ++i) p.alpha = std::max(p.alpha, std::abs(p.coefficients[i]));

    const auto comma = interval_text.find(',');
    if (comma == std::string::npos)
        throw obc::domain_error("ParameterOutOfRange", "--interval expects a,b");
    const double a = std::stod(interval_text.substr(0, comma));
    const double b = std::stod(interval_text.substr(comma + 1));

    constexpr int kGrid = 10'000;
    bool hypothesis_ok = true;
    for (int i = 0; i <= kGrid && hypothesis_ok; ++i)
        hypothesis_ok = obc::check_delta_k(p, a + (b - a) * i / kGrid, delta, k);

    const obc::MeasureBound bound = obc::lojasiewicz_bound(p, k, delta, eps, a, b);
    const double measure_roots = obc::sublevel_measure(p, eps, a, b, obc::MeasureMode::Roots);
    const double measure_grid = obc::sublevel_measure(p, eps, a, b, obc::MeasureMode::Grid);
    const bool violation = measure_roots > bound.bound || measure_grid > bound.bound;

    emit(json{{"command", "transversality-check"},
              {"k", k},
              {"delta", delta},
              {"epsilon", eps},
              {"interval", json::array({a, b})},
              {"degree", p.degree()},
              {"hypothesis_grid_ok", hypothesis_ok},
              {"hypothesis_grid_points", kGrid + 1},
              {"constant", bound.constant},
              {"bound", bound.bound},
              {"measure_roots", measure_roots},
              {"measure_grid", measure_grid},
              {"violation", violation},
              {"note", kGridNote}},
         json_path);
    return violation ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"outer billiards with contraction: simulation, certification, basins, transversality"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* simulate = app.add_subcommand("simulate", "iterate the map from a starting point");
    std::string point_text;
    int steps = 100;
    std::string csv_path;
    add_common(simulate, args);
    simulate->add_option("--point", point_text, "starting point X,Y")->required();
    simulate->add_option("--steps", steps, "number of iterations");
    simulate->add_option("--csv", csv_path, "write the orbit as CSV (step,x,y,cone_index)");

    auto* itineraries = app.add_subcommand("itineraries", "count admissible itineraries per depth");
    int itin_depth = 10;
    add_common(itineraries, args);
    itineraries->add_option("--depth", itin_depth, "maximum itinerary length")->required();

    auto* singular = app.add_subcommand("singular", "order-n singular set as an SVG line drawing");
    int order = 1;
    std::string svg_path;
    add_common(singular, args);
    singular->add_option("--order", order, "singular set order")->required();
    singular->add_option("--svg", svg_path, "output SVG path")->required();

    auto* certify = app.add_subcommand("certify", "certify asymptotic periodicity and list attractors");
    int max_depth = 100;
    double safety = 1.25;
    bool strict = false;
    add_common(certify, args);
    certify->add_option("--max-depth", max_depth, "maximum subdivision depth");
    certify->add_option("--safety", safety, "safety factor on the covering radius");
    certify->add_flag("--strict", strict, "exit 2 when the certificate is inconclusive");

    auto* attractors = app.add_subcommand("attractors", "enumerate attractors at a fixed depth");
    int attr_depth = 10;
    double attr_tol = 0.0;
    add_common(attractors, args);
    attractors->add_option("--depth", attr_depth, "subdivision depth")->required();
    attractors->add_option("--tol", attr_tol, "strict-inclusion slack");

    auto* basins = app.add_subcommand("basins", "rasterize basins of attraction to a PPM image");
    std::string res_text, bbox_text, out_path, palette_path;
    int basin_max_iter = 20000;
    double basin_tol = 0.0;
    int basin_max_depth = 100;
    int basin_depth_override = 0;
    double basin_safety = 1.25;
    add_common(basins, args);
    basins->add_option("--res", res_text, "resolution WxH")->required();
    basins->add_option("--bbox", bbox_text, "view box x0,y0,x1,y1 (default: trap square)");
    basins->add_option("--out", out_path, "output PPM path")->required();
    basins->add_option("--palette", palette_path, "palette file with 'label r g b' lines");
    basins->add_option("--max-iter", basin_max_iter, "iteration cap per pixel");
    basins->add_option("--tol", basin_tol, "attractor capture distance (default 1e-9 * trap radius)");
    basins->add_option("--max-depth", basin_max_depth, "certification depth cap");
    basins->add_option("--depth", basin_depth_override, "skip certification, enumerate at this depth");
    basins->add_option("--safety", basin_safety, "certification safety factor");

    auto* trans = app.add_subcommand("transversality", "polynomial transversality machinery");
    trans->require_subcommand(1);
    auto* bounds = trans->add_subcommand("bounds", "two-sided estimates of r_alpha(k)");
    double alpha = 1.0;
    int kmax = 10;
    std::string bounds_json;
    bounds->add_option("--alpha", alpha, "coefficient bound")->required();
    bounds->add_option("--kmax", kmax, "largest k");
    bounds->add_option("--json", bounds_json, "also write the JSON report to this file");
    auto* check = trans->add_subcommand("check", "sublevel measure against the explicit bound");
    std::string poly_path, interval_text, check_json;
    double delta = 0.5, eps = 0.1;
    int check_k = 1;
    check->add_option("--poly", poly_path, "coefficient file, constant term first")->required();
    check->add_option("--delta", delta, "transversality level in (0,1)")->required();
    check->add_option("--eps", eps, "sublevel threshold")->required();
    check->add_option("--interval", interval_text, "interval a,b")->required();
    check->add_option("--k", check_k, "transversality order");
    check->add_option("--json", check_json, "also write the JSON report to this file");

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            return app.exit(e);
        }
        if (simulate->parsed()) return run_simulate(args, point_text, steps, csv_path);
        if (itineraries->parsed()) return run_itineraries(args, itin_depth);
        if (singular->parsed()) return run_singular(args, order, svg_path);
        if (certify->parsed()) return run_certify(args, max_depth, safety, strict);
        if (attractors->parsed()) return run_attractors(args, attr_depth, attr_tol);
        if (basins->parsed())
            return run_basins(args, res_text, bbox_text, out_path, palette_path, basin_max_iter, basin_tol,
                              basin_max_depth, basin_depth_override, basin_safety);
        if (bounds->parsed()) return run_trans_bounds(alpha, kmax, bounds_json);
        if (check->parsed()) return run_trans_check(poly_path, delta, eps, interval_text, check_k, check_json);
        return 1;
    } catch (const StrictInconclusive& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const obc::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const obc::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
