// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   stsim_acceptance --cli PATH_TO_STSIM --work SCRATCH_DIR
//
// Set STSIM_UPDATE_GOLDEN=1 to re-pin the golden sphere imprint.

#include "../test_support.h"

#include "stsim/compliance.h"
#include "stsim/datasetgen.h"
#include "stsim/geometry.h"
#include "stsim/image_io.h"
#include "stsim/scene.h"
#include "stsim/sensor.h"
#include "stsim/shading.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace stsim;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            if (!pass) detail << "; ";
            detail << what;
            pass = false;
        }
    }
};

struct Settings {
    std::string cli;
    fs::path work;
};

int run(const std::string& cmd)
{
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative path -> contents for every regular file under root.
std::map<std::string, std::string> tree(const fs::path& root)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            out[fs::relative(e.path(), root).string()] = slurp(e.path());
        }
    }
    return out;
}

double phong_channel(const Vec3& n, const Vec3& l, double ka, double ia, double kd, double id, double ks, double is,
                     double alpha)
{
    const double ln = l.x * n.x + l.y * n.y + l.z * n.z;
    const double rz = 2 * ln * n.z - l.z;
    const double v = ka * ia + kd * std::max(ln, 0.0) * id + ks * std::pow(std::max(rz, 0.0), alpha) * is;
    return std::min(std::max(v, 0.0), 1.0);
}

// ---------------------------------------------------------------------------

void phong_identities(Outcome& o, const Settings&)
{
    const Vec3 z{0, 0, 1};
    const double h = M_SQRT1_2;
    auto close = [](const Vec3& a, const Vec3& b) {
        return std::abs(a.x - b.x) < 1e-6 && std::abs(a.y - b.y) < 1e-6 && std::abs(a.z - b.z) < 1e-6;
    };
    o.require(close(shading::reflect(z, z), z), "reflect aligned");
    o.require(close(shading::reflect({1, 0, 0}, z), {-1, 0, 0}), "reflect grazing");
    o.require(close(shading::reflect(z, {h, 0, h}), {1, 0, 0}), "reflect 45");

    shading::PhongParams p;
    p.i_a = {1, 1, 1};
    const Rgb aligned = shading::shade_pixel(z, {{z, {1, 1, 1}, {1, 1, 1}}}, p, z);
    o.require(std::abs(aligned.r - 1.0) < 1e-6 && std::abs(aligned.b - 1.0) < 1e-6, "aligned white != 1.0");
    const Rgb grazing = shading::shade_pixel(z, {{{1, 0, 0}, {1, 1, 1}, {1, 1, 1}}}, p, z);
    o.require(std::abs(grazing.g - 0.8) < 1e-6, "grazing != 0.8");
    const Vec3 l{-h, 0, h};
    const Rgb red = shading::shade_pixel(z, {{l, {1, 0, 0}, {1, 0, 0}}}, p, z);
    o.require(std::abs(red.r - phong_channel(z, l, 0.8, 1, 1, 1, 0.5, 1, 5)) < 1e-6, "45-degree red vs oracle");
    o.require(std::abs(red.g - phong_channel(z, l, 0.8, 1, 1, 0, 0.5, 0, 5)) < 1e-6, "45-degree green vs oracle");

    const sensor::SensorConfig cfg;
    const geometry::HeightField flat(ScalarGrid(cfg.width, cfg.height, 0.0), cfg.pixel_pitch());
    const sensor::Sensor s(cfg);
    const shading::TactileImage img = s.render_tactile(flat);
    bool uniform = true;
    for (const Rgb& px : img) uniform = uniform && px == img[0];
    o.require(uniform, "flat render not bit-uniform");
    o.detail << (o.pass ? "3 reflect + 3 shade examples within 1e-6; 224x224 flat render bit-uniform" : "");
}

void normal_accuracy(Outcome& o, const Settings&)
{
    const fixtures::SphereCap cap = fixtures::default_cap();
    const geometry::NormalField n = geometry::normals_covariance(cap.field(), 1);
    double sq = 0;
    int count = 0;
    for (int j = 0; j < cap.size; ++j) {
        for (int i = 0; i < cap.size; ++i) {
            if (!cap.away_from_rim(i, j, 3.0)) continue;
            const Vec3 truth = cap.inside(i, j) ? cap.normal(i, j) : Vec3{0, 0, 1};
            const double a = fixtures::angle_deg(n.at(i, j), truth);
            sq += a * a;
            ++count;
        }
    }
    const double rms = std::sqrt(sq / count);
    o.require(rms < 2.0, "sphere RMS " + std::to_string(rms) + " deg");

    // Tilted planes: any slope, any radius.
    double worst = 0;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = 0.8 * u(rng), b = 0.8 * u(rng);
        const double pitch = 1e-4;
        ScalarGrid g(48, 48);
        for (int y = 0; y < 48; ++y)
            for (int x = 0; x < 48; ++x) g.at(x, y) = 0.01 + a * (x - 24) * pitch + b * (y - 24) * pitch;
        const Vec3 truth = normalized({-a, -b, 1});
        const geometry::NormalField pn = geometry::normals_covariance(geometry::HeightField(g, pitch), 1 + trial % 3);
        for (int y = 4; y < 44; ++y) {
            for (int x = 4; x < 44; ++x) {
                const Vec3 d = pn.at(x, y) - truth;
                worst = std::max({worst, std::abs(d.x), std::abs(d.y), std::abs(d.z)});
            }
        }
    }
    o.require(worst < 1e-4, "plane error " + std::to_string(worst));
    std::ostringstream d;
    d << "sphere RMS " << rms << " deg over " << count << " px; plane max component error " << worst;
    o.detail << (o.pass ? d.str() : "");
}

void equilibrium(Outcome& o, const Settings&)
{
    const double gel = 0.005;
    compliance::ComplianceParams params;
    std::ostringstream d;

    // Flat bottom: delta = W / (k A).
    ScalarGrid flat(100, 100, std::numeric_limits<double>::infinity());
    for (int y = 20; y < 70; ++y)
        for (int x = 10; x < 90; ++x) flat.at(x, y) = 0.0;
    double worst_rel = 0;
    for (double w : {0.1, 2.0, 11.0, 16.0}) {
        const auto r = compliance::solve_penetration(flat, 1e-3, w, params, gel);
        const double expected = w / (params.k_pixel * 4000);
        worst_rel = std::max(worst_rel, std::abs(r.penetration - expected) / expected);
    }
    o.require(worst_rel <= 1e-9, "flat relative error " + std::to_string(worst_rel));
    d << "flat rel err " << worst_rel;

    // Sphere vs 1 um sweep.
    scene::SceneObject ball;
    ball.shape = scene::Sphere{0.04};
    const scene::SensorGrid grid = sensor::SensorConfig{}.grid();
    const ScalarGrid c = scene::lower_surface(ball, {}, grid);
    double worst_step = 0;
    for (double grams : {50.0, 180.0, 400.0}) {
        const double w = compliance::grams_to_newtons(grams);
        const auto r = compliance::solve_penetration(c, grid.pixel_pitch, w, params, gel);
        double swept = -1;
        for (int k = 0; k <= 5000 && swept < 0; ++k) {
            if (compliance::load_at(c, k * 1e-6, params.k_pixel, gel) >= w) swept = k * 1e-6;
        }
        if (r.saturated || swept < 0) {
            o.require(false, "sphere saturated at " + std::to_string(grams) + " g");
            continue;
        }
        worst_step = std::max(worst_step, std::abs(r.penetration - swept));
    }
    o.require(worst_step <= 1e-6, "sphere off sweep by " + std::to_string(worst_step));
    d << "; sphere vs sweep " << worst_step << " m";

    // 100 random (object, weight) draws over the built-in catalogs.
    std::vector<scene::SceneObject> objects;
    for (const char* r : {"household", "texture", "fill"}) {
        for (const auto& obj : dataset::builtin_recipe(r).objects) objects.push_back(obj);
    }
    // Weights are drawn below each scene's full-compression capacity.
    scene::RandomStream rng(2019);
    double worst_force = 0;
    for (int t = 0; t < 100; ++t) {
        const auto& obj = objects[rng.next_u64() % objects.size()];
        const scene::Pose pose = scene::sample_pose(rng, scene::footprint_bounds(obj, grid));
        const ScalarGrid clearance = scene::lower_surface(obj, pose, grid);
        const double w = compliance::load_at(clearance, gel, params.k_pixel, gel) * rng.uniform();
        const auto r = compliance::solve_penetration(clearance, grid.pixel_pitch, w, params, gel);
        o.require(!r.saturated, obj.id + " saturated below capacity");
        worst_force = std::max(worst_force, std::abs(r.total_force - w));
    }
    o.require(worst_force <= 1e-4, "force imbalance " + std::to_string(worst_force) + " N");
    d << "; max |F-W| " << worst_force << " N over 100 draws";
    o.detail << (o.pass ? d.str() : "");
}

void monotone_metrology(Outcome& o, const Settings&)
{
    const dataset::Recipe fill = dataset::builtin_recipe("fill");
    const sensor::Sensor s{sensor::SensorConfig{}};
    const auto plan = dataset::plan_samples(fill, 7, s.config().grid());
    int violations = 0;
    int placements = 0;
    for (const auto& sp : plan) {
        if (sp.object_index != 0) continue;
        ++placements;
        double prev_pen = -1;
        std::size_t prev_area = 0;
        bool first = true;
        for (const auto& obj : fill.objects) {
            const sensor::SensorOutput out = s.capture(obj, sp.pose);
            const bool ok = first || (out.load.penetration > prev_pen && out.load.contact_area_px() > prev_area);
            if (!ok && violations++ == 0) {
                o.detail << "first violation at " << sp.sample_id << "; ";
            }
            prev_pen = out.load.penetration;
            prev_area = out.load.contact_area_px();
            first = false;
        }
    }
    o.require(placements == 120, std::to_string(placements) + " placements");
    o.require(violations == 0, std::to_string(violations) + " non-increasing steps");
    if (o.pass) o.detail << placements << " placements x 3 weights at 224x224, all strictly increasing";
}

void reproducibility(Outcome& o, const Settings& st)
{
    const fs::path a = st.work / "fill_a";
    const fs::path b = st.work / "fill_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const std::string gen = quote(st.cli) + " generate --recipe fill --seed 7 --out ";
    o.require(run(gen + quote(a.string())) == 0, "first generate failed");
    o.require(run(gen + quote(b.string())) == 0, "second generate failed");
    if (!o.pass) return;
    const auto ta = tree(a);
    o.require(ta == tree(b), "trees differ");
    o.require(run(quote(st.cli) + " validate " + quote((a / "manifest.json").string())) == 0, "validate failed");

    auto counts = [&](const fs::path& dir, std::map<std::string, int>& per_class) {
        const json m = json::parse(slurp(dir / "manifest.json"));
        for (const auto& s : m["samples"]) ++per_class[s["class_label"].get<std::string>()];
    };
    auto check = [&](const std::string& recipe, const std::vector<std::string>& extra, std::size_t classes, int n) {
        fs::path dir = a;
        if (!extra.empty()) {
            dir = st.work / recipe;
            fs::remove_all(dir);
            std::string cmd = quote(st.cli) + " generate --recipe " + recipe + " --seed 7 --out " + quote(dir.string());
            for (const auto& e : extra) cmd += " " + e;
            o.require(run(cmd) == 0, recipe + " generate failed");
            o.require(run(quote(st.cli) + " validate " + quote((dir / "manifest.json").string())) == 0,
                      recipe + " validate failed");
            if (!o.pass) return;
        }
        std::map<std::string, int> per_class;
        counts(dir, per_class);
        o.require(per_class.size() == classes, recipe + ": " + std::to_string(per_class.size()) + " classes");
        for (const auto& [label, count] : per_class) {
            o.require(count == n, recipe + "/" + label + ": " + std::to_string(count));
        }
    };
    check("fill", {}, 3, 120);
    check("texture", {"--resolution 64 64"}, 6, 100);
    check("household", {"--resolution 24 24"}, 10, 600);
    if (o.pass) {
        o.detail << "fill seed 7 byte-identical (" << ta.size() << " files), validate exit 0; "
                 << "counts fill 120/level, texture 100/class, household 600/class/modality";
    }
}

void modality_separation(Outcome& o, const Settings&)
{
    const sensor::Sensor s{sensor::SensorConfig{}};
    int objects = 0;
    scene::RandomStream rng(5);
    for (const char* r : {"household", "texture", "fill"}) {
        for (const auto& obj : dataset::builtin_recipe(r).objects) {
            ++objects;
            const scene::Pose pose = scene::sample_pose(rng, scene::footprint_bounds(obj, s.config().grid()));
            const sensor::SensorOutput base = s.capture(obj, pose);

            scene::SceneObject recolored = obj;
            recolored.albedo.kind = scene::AlbedoKind::checker;
            recolored.albedo.primary = {1 - obj.albedo.primary.r, 0.3, obj.albedo.primary.b * 0.5};
            recolored.albedo.secondary = {0.1, 0.9, 0.2};
            recolored.albedo.period = 0.007;
            const sensor::SensorOutput c = s.capture(recolored, pose);
            o.require(c.tactile == base.tactile, obj.id + ": albedo changed the tactile image");
            o.require(!(c.visual == base.visual), obj.id + ": albedo did not change the visual image");

            scene::SceneObject heavier = obj;
            heavier.weight_g = obj.weight_g * 2.5 + 10;
            const sensor::SensorOutput h = s.capture(heavier, pose);
            o.require(h.visual == base.visual, obj.id + ": weight changed the visual image");
            o.require(!(h.tactile == base.tactile), obj.id + ": weight did not change the tactile image");
        }
    }
    if (o.pass) o.detail << objects << " catalog objects at 224x224: tactile albedo-invariant, visual weight-invariant";
}

void golden_sphere(Outcome& o, const Settings&)
{
    const sensor::Sensor s{sensor::SensorConfig{}};
    const scene::SceneObject apple = dataset::builtin_object("apple");
    const sensor::SensorOutput out = s.capture(apple, {});
    const io::Rgb8Image img = io::quantize(out.tactile);

    // Rim layout: each side of the imprint catches its own LED.
    const Rgb flat = s.baseline()[0];
    const int w = img.width, h = img.height;
    double sums[4][4] = {};  // side (right, left, top, bottom) x (r, g, b, luminance)
    int n[4] = {};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Rgb px = out.tactile.at(x, y);
            if (px == flat) continue;
            const double dx = x + 0.5 - 0.5 * w, dy = y + 0.5 - 0.5 * h;
            int side;
            if (std::abs(dx) >= std::abs(dy)) {
                side = dx > 0 ? 0 : 1;
            } else {
                side = dy < 0 ? 2 : 3;
            }
            sums[side][0] += px.r;
            sums[side][1] += px.g;
            sums[side][2] += px.b;
            sums[side][3] += 0.2126 * px.r + 0.7152 * px.g + 0.0722 * px.b;
            ++n[side];
        }
    }
    auto mean = [&](int side, int ch) { return n[side] ? sums[side][ch] / n[side] : 0.0; };
    o.require(n[0] > 50 && n[1] > 50 && n[2] > 50 && n[3] > 50, "imprint too small");
    o.require(mean(0, 2) > mean(1, 2), "blue rim not on the right");
    o.require(mean(2, 0) > mean(3, 0), "red rim not on the top");
    o.require(mean(3, 1) > mean(2, 1), "green rim not on the bottom");
    o.require(mean(1, 3) > mean(0, 3), "white rim not on the left");

    const fs::path golden = fs::path(STSIM_GOLDEN_DIR) / "golden_sphere_tactile.png";
    const char* update = std::getenv("STSIM_UPDATE_GOLDEN");
    if (!fs::exists(golden) || (update != nullptr && *update != '\0' && *update != '0')) {
        fs::create_directories(golden.parent_path());
        io::write_png(golden.string(), img);
        o.detail << "pinned " << golden.filename().string() << "; ";
    }
    const io::Rgb8Image pinned = io::read_png(golden.string());
    std::size_t diff = 0;
    if (pinned.width == img.width && pinned.height == img.height) {
        for (std::size_t i = 0; i < img.pixels.size(); ++i) diff += pinned.pixels[i] != img.pixels[i];
    } else {
        diff = img.pixels.size();
    }
    o.require(diff == 0, std::to_string(diff) + " bytes differ from golden");
    if (o.pass) {
        o.detail << "bit-exact vs golden; rims right=blue top=red left=white bottom=green, penetration "
                 << out.load.penetration * 1e3 << " mm";
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"stsim acceptance suite"};
    Settings st;
    app.add_option("--cli", st.cli, "Path to the stsim executable")->required();
    std::string work;
    app.add_option("--work", work, "Scratch directory")->required();
    CLI11_PARSE(app, argc, argv);
    st.work = work;
    fs::create_directories(st.work);

    const std::vector<std::pair<std::string, std::function<void(Outcome&, const Settings&)>>> criteria = {
        {"phong_identities", phong_identities},
        {"normal_accuracy", normal_accuracy},
        {"equilibrium", equilibrium},
        {"monotone_metrology", monotone_metrology},
        {"dataset_reproducibility", reproducibility},
        {"modality_separation", modality_separation},
        {"golden_sphere_imprint", golden_sphere},
    };

    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(o, st);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  %-24s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.str().c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
