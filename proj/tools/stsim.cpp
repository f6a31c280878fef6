// stsim: visuotactile dataset generator.
//
//   stsim generate --recipe <household|texture|fill|custom.json> --seed N --out DIR
//                  [--resolution W H] [--config FILE] [--float-sidecar] [--threads N]
//   stsim validate MANIFEST
//   stsim render --object ID --pose x,y,theta --out PREFIX [--catalog FILE]
//   stsim render --depth FILE --out PREFIX
//
// Exit codes: 0 success, 1 usage error, 2 validation failure.

#include "stsim/datasetgen.h"
#include "stsim/image_io.h"
#include "stsim/sensor.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;

stsim::sensor::SensorConfig resolve_config(const std::string& config_path, const std::vector<int>& resolution)
{
    std::string path = config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("STSIM_CONFIG"); env != nullptr && *env != '\0') {
            path = env;
        }
    }
    stsim::sensor::SensorConfig config = path.empty() ? stsim::sensor::SensorConfig{} : stsim::sensor::load_config(path);
    if (!resolution.empty()) {
        config = stsim::sensor::resample(config, resolution[0], resolution[1]);
    }
    config.validate();
    return config;
}

stsim::scene::Pose parse_pose(const std::string& text)
{
    std::istringstream in(text);
    stsim::scene::Pose pose;
    char c1 = 0;
    char c2 = 0;
    if (!(in >> pose.x >> c1 >> pose.y >> c2 >> pose.theta) || c1 != ',' || c2 != ',' || !(in >> std::ws).eof()) {
        throw std::invalid_argument("--pose expects x,y,theta (meters, meters, radians)");
    }
    return pose;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Visuotactile sensor simulator and dataset generator"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<int> resolution;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Sensor config JSON (falls back to $STSIM_CONFIG)");
        sub->add_option("--resolution", resolution, "Output resolution W H")->expected(2)->check(CLI::PositiveNumber);
    };

    auto* gen = app.add_subcommand("generate", "Render a labeled dataset and its manifest");
    std::string recipe_name;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool sidecar = false;
    unsigned threads = 0;
    gen->add_option("--recipe", recipe_name, "household, texture, fill or a recipe JSON file")->required();
    gen->add_option("--seed", seed, "Master seed")->required();
    gen->add_option("--out", out_dir, "Output directory")->required();
    gen->add_flag("--float-sidecar", sidecar, "Also write STSD float penetration maps");
    gen->add_option("--threads", threads, "Worker threads (0: all cores)");
    add_common(gen);

    auto* val = app.add_subcommand("validate", "Check a manifest and the files it references");
    std::string manifest_path;
    val->add_option("manifest", manifest_path, "manifest.json")->required();

    auto* render = app.add_subcommand("render", "Render one object or depth map for inspection");
    std::string object_id;
    std::string catalog_path;
    std::string pose_text = "0,0,0";
    std::string depth_path;
    std::string prefix;
    auto* object_opt = render->add_option("--object", object_id, "Object id");
    render->add_option("--catalog", catalog_path, "Catalog JSON (default: built-in catalogs)");
    render->add_option("--pose", pose_text, "x,y,theta in meters and radians");
    auto* depth_opt = render->add_option("--depth", depth_path, "STSD or 16-bit PGM penetration map");
    render->add_option("--out", prefix, "Output prefix")->required();
    object_opt->excludes(depth_opt);
    add_common(render);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*gen) {
            const auto config = resolve_config(config_path, resolution);
            const auto recipe = stsim::dataset::resolve_recipe(recipe_name);
            stsim::dataset::GenerateOptions options;
            options.float_sidecar = sidecar;
            options.threads = threads;
            const auto manifest = stsim::dataset::generate(recipe, config, seed, out_dir, options);
            std::cout << "wrote " << manifest["samples"].size() << " samples to " << out_dir << "/manifest.json\n";
            return 0;
        }

        if (*val) {
            const auto report = stsim::dataset::validate(manifest_path);
            for (const auto& issue : report.issues) {
                std::cout << issue << '\n';
            }
            if (!report.clean()) {
                std::cerr << report.issues.size() << " issue(s) in " << manifest_path << '\n';
                return kExitInvalid;
            }
            return 0;
        }

        if (*render) {
            const auto config = resolve_config(config_path, resolution);
            const stsim::sensor::Sensor sensor(config);
            if (!depth_path.empty()) {
                const auto raw = stsim::io::load_raw_depth(depth_path, config.pgm_meters_per_level, config.pixel_pitch());
                const auto surface = stsim::geometry::clip_depth(raw.depth, raw.pixel_pitch, config.gel_thickness);
                stsim::io::write_png(prefix + "_tactile.png", sensor.render_tactile(surface));
                return 0;
            }
            if (object_id.empty()) {
                std::cerr << "render: one of --object or --depth is required\n";
                return kExitUsage;
            }
            stsim::scene::SceneObject obj;
            if (catalog_path.empty()) {
                obj = stsim::dataset::builtin_object(object_id);
            } else {
                const auto objects = stsim::dataset::catalog_from_json(stsim::dataset::read_json_file(catalog_path));
                const auto it = std::find_if(objects.begin(), objects.end(),
                                             [&](const auto& o) { return o.id == object_id; });
                if (it == objects.end()) {
                    throw std::invalid_argument("no object '" + object_id + "' in " + catalog_path);
                }
                obj = *it;
            }
            const auto out = sensor.capture(obj, parse_pose(pose_text));
            stsim::io::write_png(prefix + "_tactile.png", out.tactile);
            stsim::io::write_png(prefix + "_visual.png", out.visual);
            stsim::io::write_png(prefix + "_blended.png", out.blended);
            std::cout << nlohmann::json{{"object_id", obj.id},
                                        {"penetration_m", out.load.penetration},
                                        {"total_force_n", out.load.total_force},
                                        {"saturated", out.load.saturated},
                                        {"contact_area_px", out.load.contact_area_px()}}
                             .dump()
                      << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "stsim: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
