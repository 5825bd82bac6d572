// Command-line renderer for smooth vector graphics scenes: gradient meshes,
// diffusion curves, and Poisson curves rasterized through an edge graph,
// unified patches, and per-patch Poisson solves.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vgr/pipeline.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitPipeline = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw vgr::ParseError("cannot read scene file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonOpts {
    std::string scene_path;
    std::optional<double> tau, epsilon, residual;
    std::optional<int> iterations, mg_levels;
    std::optional<std::string> overlap;
};

void add_tuning_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--tau", [&o](const CLI::results_t& r) {
        o.tau = std::stod(r[0]);
        return true;
    }, "Endpoint snapping threshold (squared distance)");
    cmd->add_option("--epsilon", [&o](const CLI::results_t& r) {
        o.epsilon = std::stod(r[0]);
        return true;
    }, "Curve discretization error bound (image units)");
    cmd->add_option("--iterations", [&o](const CLI::results_t& r) {
        o.iterations = std::stoi(r[0]);
        return true;
    }, "Solver sweep budget (fine-level equivalents)");
    cmd->add_option("--mg-levels", [&o](const CLI::results_t& r) {
        o.mg_levels = std::stoi(r[0]);
        return true;
    }, "Multigrid levels");
    cmd->add_option("--residual", [&o](const CLI::results_t& r) {
        o.residual = std::stod(r[0]);
        return true;
    }, "Residual target (h^2-scaled units)");
    cmd->add_option("--overlap", [&o](const CLI::results_t& r) {
        o.overlap = r[0];
        return true;
    }, "Overlap mode for stacked meshes: zero|sum|average|first");
}

vgr::RenderOptions to_render_options(const CommonOpts& o, int width, int height) {
    vgr::RenderOptions opt;
    opt.width = width;
    opt.height = height;
    opt.tau = o.tau;
    opt.epsilon = o.epsilon;
    opt.iterations = o.iterations;
    opt.multigrid_levels = o.mg_levels;
    opt.residual_target = o.residual;
    if (o.overlap) {
        auto m = vgr::overlap_mode_from_name(*o.overlap);
        if (!m) throw vgr::ValidationError("unknown overlap mode: " + *o.overlap);
        opt.overlap = m;
    }
    return opt;
}

bool parse_resolution(const std::string& text, int* w, int* h) {
    size_t x = text.find('x');
    if (x == std::string::npos) return false;
    try {
        *w = std::stoi(text.substr(0, x));
        *h = std::stoi(text.substr(x + 1));
    } catch (...) {
        return false;
    }
    return *w > 0 && *h > 0;
}

int cmd_render(const CommonOpts& common, const std::string& out_path,
               const std::string& resolution, unsigned dump_flags) {
    int w = 512, h = 512;
    if (!resolution.empty() && !parse_resolution(resolution, &w, &h)) {
        std::cerr << "error: --resolution expects WxH\n";
        return kExitUsage;
    }
    vgr::Scene scene = vgr::parse_scene(read_file(common.scene_path));
    vgr::RenderOptions opt = to_render_options(common, w, h);

    std::string base = out_path;
    if (size_t dot = base.rfind('.'); dot != std::string::npos) base = base.substr(0, dot);
    vgr::RenderResult result =
        vgr::render_scene(scene, opt, dump_flags ? &base : nullptr, dump_flags);

    for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
    vgr::write_image(result.image, out_path);
    std::printf("wrote %s (%dx%d, %d patches, residual %.3g)\n", out_path.c_str(), w, h,
                result.stats.patches, result.stats.max_residual);
    return 0;
}

int cmd_stats(const CommonOpts& common) {
    vgr::Scene scene = vgr::parse_scene(read_file(common.scene_path));
    double tau = common.tau.value_or(scene.settings.tau);
    double epsilon = common.epsilon.value_or(scene.epsilon_or_default());
    vgr::OverlapMode mode = scene.settings.overlap_mode;
    if (common.overlap) {
        auto m = vgr::overlap_mode_from_name(*common.overlap);
        if (!m) throw vgr::ValidationError("unknown overlap mode: " + *common.overlap);
        mode = *m;
    }
    vgr::SceneGeometry geo = vgr::build_geometry(scene, tau, epsilon, mode);
    for (const auto& warning : geo.warnings) std::cerr << "warning: " << warning << "\n";

    int iterations = common.iterations.value_or(scene.settings.iterations);
    std::printf("%6s %6s %6s %6s %6s %6s %12s %12s %14s %8s\n", "#DCs", "#PCs", "#GMs", "#Vs",
                "#Es", "#Ps", "Form graph", "Trav. graph", "Form patches", "It.");
    std::printf("%6zu %6zu %6zu %6zu %6zu %6zu %10.1fms %10.1fms %12.1fms %8d\n",
                scene.diffusion_curves.size(), scene.poisson_curves.size(), scene.meshes.size(),
                geo.graph.vertices().size(), geo.graph.edges().size(), geo.patches.size(),
                geo.graph_ms, geo.trace_ms, geo.patches_ms, iterations);

    std::printf("STAT dcs %zu\n", scene.diffusion_curves.size());
    std::printf("STAT pcs %zu\n", scene.poisson_curves.size());
    std::printf("STAT gms %zu\n", scene.meshes.size());
    std::printf("STAT vertices %zu\n", geo.graph.vertices().size());
    std::printf("STAT edges %zu\n", geo.graph.edges().size());
    std::printf("STAT patches %zu\n", geo.patches.size());
    std::printf("STAT form_graph_ms %.3f\n", geo.graph_ms);
    std::printf("STAT traverse_ms %.3f\n", geo.trace_ms);
    std::printf("STAT form_patches_ms %.3f\n", geo.patches_ms);
    std::printf("STAT iterations %d\n", iterations);
    return 0;
}

int cmd_validate(const CommonOpts& common) {
    vgr::Scene scene = vgr::parse_scene(read_file(common.scene_path));
    vgr::ValidationReport report = vgr::validate_scene(scene, common.tau);
    for (const auto& e : report.errors) std::printf("error: %s\n", e.c_str());
    for (const auto& w : report.warnings) std::printf("warning: %s\n", w.c_str());
    if (report.errors.empty() && report.warnings.empty()) std::printf("scene is clean\n");
    return report.errors.empty() ? 0 : kExitParse;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vgrender - smooth vector graphics rasterizer"};
    app.require_subcommand(1);

    CommonOpts render_opts, stats_opts, validate_opts;
    std::string out_path, resolution;
    bool dump_graph = false, dump_patches = false, dump_masks = false, dump_source = false;

    CLI::App* render = app.add_subcommand("render", "Render a scene to PNG, or PPM");
    render->add_option("scene", render_opts.scene_path, "Scene file")->required();
    render->add_option("output", out_path, "Output image (.png or .ppm)")->required();
    render->add_option("--resolution", resolution, "Output size as WxH (default 512x512)");
    add_tuning_flags(render, render_opts);
    render->add_flag("--dump-graph", dump_graph, "Write edge-graph overlay and listing");
    render->add_flag("--dump-patches", dump_patches, "Write patch map, listing, and layers");
    render->add_flag("--dump-masks", dump_masks, "Write pixel-type and staggered-flag maps");
    render->add_flag("--dump-source", dump_source, "Write the source-term heat map");

    CLI::App* stats = app.add_subcommand("stats", "Print pipeline statistics");
    stats->add_option("scene", stats_opts.scene_path, "Scene file")->required();
    add_tuning_flags(stats, stats_opts);

    CLI::App* validate = app.add_subcommand("validate", "Report leak risks and degeneracies");
    validate->add_option("scene", validate_opts.scene_path, "Scene file")->required();
    add_tuning_flags(validate, validate_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (render->parsed()) {
            unsigned flags = (dump_graph ? vgr::kDumpGraph : 0u) |
                             (dump_patches ? vgr::kDumpPatches : 0u) |
                             (dump_masks ? vgr::kDumpMasks : 0u) |
                             (dump_source ? vgr::kDumpSource : 0u);
            return cmd_render(render_opts, out_path, resolution, flags);
        }
        if (stats->parsed()) return cmd_stats(stats_opts);
        if (validate->parsed()) return cmd_validate(validate_opts);
    } catch (const vgr::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const vgr::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return kExitPipeline;
    }
    return kExitUsage;
}
