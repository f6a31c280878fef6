#include "stsim/datasetgen.h"

#include "stsim/image_io.h"
#include "stsim/json_locator.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace stsim::dataset {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Schema helpers. Every failure names the JSON pointer of the bad value.

const json& require(const json& obj, const std::string& key, const std::string& ptr)
{
    if (!obj.contains(key)) {
        throw SchemaError(ptr, "missing required key '" + key + "'");
    }
    return obj.at(key);
}

void check_object(const json& j, const std::string& ptr)
{
    if (!j.is_object()) {
        throw SchemaError(ptr, "expected an object");
    }
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& ptr)
{
    check_object(j, ptr);
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw SchemaError(ptr + "/" + json_pointer_escape(key), "unknown key '" + key + "'");
        }
    }
}

double number(const json& j, const std::string& ptr)
{
    if (!j.is_number()) {
        throw SchemaError(ptr, "expected a number");
    }
    return j.get<double>();
}

double positive(const json& j, const std::string& ptr)
{
    const double v = number(j, ptr);
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw SchemaError(ptr, "must be positive");
    }
    return v;
}

std::string text(const json& j, const std::string& ptr)
{
    if (!j.is_string() || j.get<std::string>().empty()) {
        throw SchemaError(ptr, "expected a non-empty string");
    }
    return j.get<std::string>();
}

Rgb rgb(const json& j, const std::string& ptr)
{
    if (!j.is_array() || j.size() != 3) {
        throw SchemaError(ptr, "expected [r, g, b]");
    }
    Rgb c;
    for (int k = 0; k < 3; ++k) {
        c[k] = number(j[static_cast<std::size_t>(k)], ptr + "/" + std::to_string(k));
        if (!(c[k] >= 0.0 && c[k] <= 1.0)) {
            throw SchemaError(ptr + "/" + std::to_string(k), "color channels must lie in [0,1]");
        }
    }
    return c;
}

std::pair<double, double> size2(const json& j, const std::string& ptr)
{
    if (!j.is_array() || j.size() != 2) {
        throw SchemaError(ptr, "expected [x, y] in meters");
    }
    return {positive(j[0], ptr + "/0"), positive(j[1], ptr + "/1")};
}

json rgb_json(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

const char* pattern_name(scene::BumpPattern p)
{
    switch (p) {
    case scene::BumpPattern::sinusoid:
        return "sinusoid";
    case scene::BumpPattern::radial:
        return "radial";
    case scene::BumpPattern::checker:
        return "checker";
    }
    return "sinusoid";
}

scene::Shape shape_from_json(const json& j, const std::string& ptr)
{
    check_object(j, ptr);
    const std::string type = text(require(j, "type", ptr), ptr + "/type");
    if (type == "sphere") {
        check_keys(j, {"type", "radius_m"}, ptr);
        return scene::Sphere{positive(require(j, "radius_m", ptr), ptr + "/radius_m")};
    }
    if (type == "box") {
        check_keys(j, {"type", "size_m"}, ptr);
        const auto [sx, sy] = size2(require(j, "size_m", ptr), ptr + "/size_m");
        return scene::Box{sx, sy};
    }
    if (type == "cylinder") {
        check_keys(j, {"type", "radius_m", "edge_radius_m"}, ptr);
        scene::Cylinder c;
        c.radius = positive(require(j, "radius_m", ptr), ptr + "/radius_m");
        if (j.contains("edge_radius_m")) {
            c.edge_radius = number(j["edge_radius_m"], ptr + "/edge_radius_m");
            if (!(c.edge_radius >= 0.0 && c.edge_radius <= c.radius)) {
                throw SchemaError(ptr + "/edge_radius_m", "must lie in [0, radius_m]");
            }
        }
        return c;
    }
    if (type == "textured_plate") {
        check_keys(j, {"type", "size_m"}, ptr);
        const auto [sx, sy] = size2(require(j, "size_m", ptr), ptr + "/size_m");
        return scene::TexturedPlate{sx, sy};
    }
    if (type == "engraved_plate") {
        check_keys(j, {"type", "size_m", "pattern", "period_m", "amplitude_m"}, ptr);
        scene::EngravedPlate p;
        std::tie(p.size_x, p.size_y) = size2(require(j, "size_m", ptr), ptr + "/size_m");
        const std::string pattern = text(require(j, "pattern", ptr), ptr + "/pattern");
        if (pattern == "sinusoid") {
            p.pattern = scene::BumpPattern::sinusoid;
        } else if (pattern == "radial") {
            p.pattern = scene::BumpPattern::radial;
        } else if (pattern == "checker") {
            p.pattern = scene::BumpPattern::checker;
        } else {
            throw SchemaError(ptr + "/pattern", "unknown pattern '" + pattern + "' (sinusoid|radial|checker)");
        }
        p.period = positive(require(j, "period_m", ptr), ptr + "/period_m");
        p.amplitude = number(require(j, "amplitude_m", ptr), ptr + "/amplitude_m");
        if (!(p.amplitude >= 0.0)) {
            throw SchemaError(ptr + "/amplitude_m", "must be non-negative");
        }
        return p;
    }
    throw SchemaError(ptr + "/type",
                      "unknown shape type '" + type + "' (sphere|box|cylinder|textured_plate|engraved_plate)");
}

json shape_to_json(const scene::Shape& shape)
{
    struct Visitor {
        json operator()(const scene::Sphere& s) const { return {{"type", "sphere"}, {"radius_m", s.radius}}; }
        json operator()(const scene::Box& b) const
        {
            return {{"type", "box"}, {"size_m", {b.size_x, b.size_y}}};
        }
        json operator()(const scene::Cylinder& c) const
        {
            return {{"type", "cylinder"}, {"radius_m", c.radius}, {"edge_radius_m", c.edge_radius}};
        }
        json operator()(const scene::TexturedPlate& p) const
        {
            return {{"type", "textured_plate"}, {"size_m", {p.size_x, p.size_y}}};
        }
        json operator()(const scene::EngravedPlate& p) const
        {
            return {{"type", "engraved_plate"},
                    {"size_m", {p.size_x, p.size_y}},
                    {"pattern", pattern_name(p.pattern)},
                    {"period_m", p.period},
                    {"amplitude_m", p.amplitude}};
        }
    };
    return std::visit(Visitor{}, shape);
}

scene::Albedo albedo_from_json(const json& j, const std::string& ptr)
{
    check_keys(j, {"type", "rgb", "rgb_alt", "period_m"}, ptr);
    const std::string type = text(require(j, "type", ptr), ptr + "/type");
    scene::Albedo a;
    a.primary = rgb(require(j, "rgb", ptr), ptr + "/rgb");
    a.secondary = a.primary;
    if (type == "constant") {
        a.kind = scene::AlbedoKind::constant;
        return a;
    }
    if (type == "checker") {
        a.kind = scene::AlbedoKind::checker;
    } else if (type == "stripes") {
        a.kind = scene::AlbedoKind::stripes;
    } else {
        throw SchemaError(ptr + "/type", "unknown albedo type '" + type + "' (constant|checker|stripes)");
    }
    a.secondary = rgb(require(j, "rgb_alt", ptr), ptr + "/rgb_alt");
    a.period = positive(require(j, "period_m", ptr), ptr + "/period_m");
    return a;
}

json albedo_to_json(const scene::Albedo& a)
{
    switch (a.kind) {
    case scene::AlbedoKind::constant:
        return {{"type", "constant"}, {"rgb", rgb_json(a.primary)}};
    case scene::AlbedoKind::checker:
    case scene::AlbedoKind::stripes:
        return {{"type", a.kind == scene::AlbedoKind::checker ? "checker" : "stripes"},
                {"rgb", rgb_json(a.primary)},
                {"rgb_alt", rgb_json(a.secondary)},
                {"period_m", a.period}};
    }
    return {};
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int line_at_byte(const std::string& text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// Parse `path` and run `fn` on it, rewriting schema errors as path:line.
template <typename Fn>
auto parse_with_diagnostics(const std::string& path, Fn fn)
{
    const std::string source = read_text(path);
    json j;
    try {
        j = json::parse(source);
    } catch (const json::parse_error& e) {
        std::ostringstream msg;
        msg << path << ":" << line_at_byte(source, e.byte > 0 ? e.byte - 1 : 0) << ": " << e.what();
        throw std::invalid_argument(msg.str());
    }
    try {
        return fn(j);
    } catch (const SchemaError& e) {
        const JsonLocator locator(source);
        std::ostringstream msg;
        msg << path << ":" << locator.line_of(e.pointer()) << ": " << (e.pointer().empty() ? "/" : e.pointer())
            << ": " << e.what();
        throw std::invalid_argument(msg.str());
    }
}

// ---------------------------------------------------------------------------
// Built-in catalogs.

scene::SceneObject make(std::string id, std::string label, scene::Shape shape, scene::Albedo albedo, double grams)
{
    scene::SceneObject o;
    o.id = std::move(id);
    o.class_label = std::move(label);
    o.shape = shape;
    o.albedo = albedo;
    o.weight_g = grams;
    return o;
}

scene::Albedo solid(double r, double g, double b) { return {scene::AlbedoKind::constant, {r, g, b}, {r, g, b}, 0.01}; }

scene::Albedo patterned(scene::AlbedoKind kind, Rgb a, Rgb b, double period) { return {kind, a, b, period}; }

std::vector<scene::SceneObject> household_catalog()
{
    using scene::AlbedoKind;
    return {
        make("apple", "apple", scene::Sphere{0.04}, solid(0.80, 0.12, 0.10), 180.0),
        make("lemon", "lemon", scene::Sphere{0.03}, solid(0.95, 0.85, 0.20), 110.0),
        make("lime", "lime", scene::Sphere{0.03}, solid(0.30, 0.75, 0.20), 110.0),
        make("mug", "mug", scene::Cylinder{0.04, 0.003}, solid(0.92, 0.92, 0.90), 350.0),
        make("soda_can", "soda_can", scene::Cylinder{0.033, 0.004},
             patterned(AlbedoKind::stripes, {0.85, 0.10, 0.10}, {0.95, 0.95, 0.95}, 0.01), 370.0),
        make("book", "book", scene::Box{0.10, 0.08}, solid(0.10, 0.15, 0.40), 450.0),
        make("phone", "phone", scene::Box{0.06, 0.12}, solid(0.05, 0.05, 0.06), 180.0),
        make("coaster", "coaster", scene::EngravedPlate{0.08, 0.08, scene::BumpPattern::radial, 0.006, 0.0008},
             solid(0.70, 0.55, 0.35), 40.0),
        make("placemat", "placemat", scene::TexturedPlate{0.09, 0.09},
             patterned(AlbedoKind::checker, {0.85, 0.15, 0.15}, {0.95, 0.95, 0.95}, 0.015), 60.0),
        make("die", "die", scene::Box{0.02, 0.02}, solid(0.95, 0.95, 0.95), 15.0),
    };
}

std::vector<scene::SceneObject> texture_catalog()
{
    // Matte black 5 cm plates, coarse (8 mm) to fine (3 mm) relief.
    const scene::Albedo black = solid(0.04, 0.04, 0.04);
    auto plate = [&](const char* id, scene::BumpPattern pattern, double period) {
        return make(id, id, scene::EngravedPlate{0.05, 0.05, pattern, period, 0.001}, black, 250.0);
    };
    return {
        plate("sinusoid_coarse", scene::BumpPattern::sinusoid, 0.008),
        plate("sinusoid_fine", scene::BumpPattern::sinusoid, 0.003),
        plate("checker_coarse", scene::BumpPattern::checker, 0.008),
        plate("checker_fine", scene::BumpPattern::checker, 0.003),
        plate("radial_coarse", scene::BumpPattern::radial, 0.008),
        plate("radial_fine", scene::BumpPattern::radial, 0.003),
    };
}

std::vector<scene::SceneObject> fill_catalog()
{
    // One bottle, three fill levels; geometry and color are shared.
    const scene::Cylinder bottle{0.035, 0.005};
    const scene::Albedo glass = solid(0.20, 0.50, 0.30);
    return {
        make("bottle_empty", "empty", bottle, glass, 446.0),
        make("bottle_half", "half_full", bottle, glass, 823.0),
        make("bottle_full", "full", bottle, glass, 1133.0),
    };
}

}  // namespace

// ---------------------------------------------------------------------------

scene::SceneObject object_from_json(const json& j, const std::string& ptr)
{
    check_keys(j, {"id", "class_label", "weight_g", "shape", "albedo"}, ptr);
    scene::SceneObject o;
    o.id = text(require(j, "id", ptr), ptr + "/id");
    o.class_label = text(require(j, "class_label", ptr), ptr + "/class_label");
    o.weight_g = number(require(j, "weight_g", ptr), ptr + "/weight_g");
    if (!(o.weight_g >= 0.0) || !std::isfinite(o.weight_g)) {
        throw SchemaError(ptr + "/weight_g", "must be non-negative");
    }
    o.shape = shape_from_json(require(j, "shape", ptr), ptr + "/shape");
    if (j.contains("albedo")) {
        o.albedo = albedo_from_json(j["albedo"], ptr + "/albedo");
    }
    try {
        o.validate(std::numeric_limits<double>::infinity());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(ptr, e.what());
    }
    return o;
}

json object_to_json(const scene::SceneObject& o)
{
    return {{"id", o.id},
            {"class_label", o.class_label},
            {"weight_g", o.weight_g},
            {"shape", shape_to_json(o.shape)},
            {"albedo", albedo_to_json(o.albedo)}};
}

std::vector<scene::SceneObject> catalog_from_json(const json& j)
{
    check_keys(j, {"schema_version", "objects"}, "");
    const json& version = require(j, "schema_version", "");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
        throw SchemaError("/schema_version", "unsupported catalog schema version (expected 1)");
    }
    const json& objects = require(j, "objects", "");
    if (!objects.is_array() || objects.empty()) {
        throw SchemaError("/objects", "expected a non-empty array");
    }
    std::vector<scene::SceneObject> out;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const std::string ptr = "/objects/" + std::to_string(i);
        out.push_back(object_from_json(objects[i], ptr));
        if (!ids.insert(out.back().id).second) {
            throw SchemaError(ptr + "/id", "duplicate object id '" + out.back().id + "'");
        }
    }
    return out;
}

json catalog_to_json(const std::vector<scene::SceneObject>& objects)
{
    json arr = json::array();
    for (const auto& o : objects) {
        arr.push_back(object_to_json(o));
    }
    return {{"schema_version", kSchemaVersion}, {"objects", arr}};
}

json read_json_file(const std::string& path)
{
    return parse_with_diagnostics(path, [](const json& j) { return j; });
}

bool is_builtin_recipe(const std::string& name)
{
    return name == "household" || name == "texture" || name == "fill";
}

Recipe builtin_recipe(const std::string& name)
{
    if (name == "household") {
        return {"household", household_catalog(), 600, 0.7};
    }
    if (name == "texture") {
        return {"texture", texture_catalog(), 100, 0.8};
    }
    if (name == "fill") {
        return {"fill", fill_catalog(), 120, 0.8};
    }
    throw std::invalid_argument("unknown built-in recipe '" + name + "' (household|texture|fill)");
}

scene::SceneObject builtin_object(const std::string& id)
{
    for (const char* name : {"household", "texture", "fill"}) {
        for (const auto& o : builtin_recipe(name).objects) {
            if (o.id == id) {
                return o;
            }
        }
    }
    throw std::invalid_argument("no built-in object with id '" + id + "'");
}

Recipe load_recipe(const std::string& path)
{
    return parse_with_diagnostics(path, [&](const json& j) {
        check_keys(j, {"schema_version", "name", "samples_per_object", "train_fraction", "catalog", "objects"}, "");
        const json& version = require(j, "schema_version", "");
        if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
            throw SchemaError("/schema_version", "unsupported recipe schema version (expected 1)");
        }
        Recipe r;
        r.name = text(require(j, "name", ""), "/name");
        const json& spo = require(j, "samples_per_object", "");
        if (!spo.is_number_integer() || spo.get<long long>() < 1) {
            throw SchemaError("/samples_per_object", "expected a positive integer");
        }
        r.samples_per_object = spo.get<int>();
        r.train_fraction = number(require(j, "train_fraction", ""), "/train_fraction");
        if (!(r.train_fraction >= 0.0 && r.train_fraction <= 1.0)) {
            throw SchemaError("/train_fraction", "must lie in [0, 1]");
        }

        if (j.contains("catalog") == j.contains("objects")) {
            throw SchemaError("", "exactly one of 'catalog' or 'objects' is required");
        }
        if (j.contains("objects")) {
            r.objects = catalog_from_json({{"schema_version", kSchemaVersion}, {"objects", j["objects"]}});
        } else {
            fs::path catalog = text(j["catalog"], "/catalog");
            if (catalog.is_relative()) {
                catalog = fs::path(path).parent_path() / catalog;
            }
            r.objects = parse_with_diagnostics(catalog.string(), catalog_from_json);
        }
        return r;
    });
}

Recipe resolve_recipe(const std::string& name_or_path)
{
    if (is_builtin_recipe(name_or_path)) {
        return builtin_recipe(name_or_path);
    }
    if (!fs::exists(name_or_path)) {
        throw std::invalid_argument("unknown recipe '" + name_or_path
                                    + "' (household, texture, fill or a recipe JSON file)");
    }
    return load_recipe(name_or_path);
}

std::vector<std::string> class_labels(const Recipe& recipe)
{
    std::vector<std::string> labels;
    for (const auto& o : recipe.objects) {
        if (std::find(labels.begin(), labels.end(), o.class_label) == labels.end()) {
            labels.push_back(o.class_label);
        }
    }
    return labels;
}

std::vector<SamplePlan> plan_samples(const Recipe& recipe, std::uint64_t master_seed, const scene::SensorGrid& grid)
{
    if (recipe.objects.empty() || recipe.samples_per_object < 1) {
        throw std::invalid_argument("recipe needs at least one object and one sample per object");
    }
    const std::vector<std::string> labels = class_labels(recipe);
    const scene::RandomStream master(master_seed);

    std::vector<SamplePlan> plan;
    plan.reserve(recipe.objects.size() * static_cast<std::size_t>(recipe.samples_per_object));
    std::vector<std::vector<std::size_t>> by_class(labels.size());
    for (std::size_t oi = 0; oi < recipe.objects.size(); ++oi) {
        const scene::SceneObject& obj = recipe.objects[oi];
        const scene::PoseBounds bounds = scene::footprint_bounds(obj, grid);
        const auto ci = static_cast<std::size_t>(
            std::find(labels.begin(), labels.end(), obj.class_label) - labels.begin());
        for (int s = 0; s < recipe.samples_per_object; ++s) {
            const std::size_t index = plan.size();
            char id[96];
            std::snprintf(id, sizeof id, "%.64s_%06zu", recipe.name.c_str(), index);
            scene::RandomStream stream = master.split(index);
            plan.push_back({id, oi, ci, scene::sample_pose(stream, bounds), false});
            by_class[ci].push_back(index);
        }
    }

    // Stratified split: seeded Fisher-Yates within each class.
    for (std::size_t ci = 0; ci < by_class.size(); ++ci) {
        std::vector<std::size_t>& members = by_class[ci];
        scene::RandomStream stream = master.split(0x5B11'7000'0000'0000ULL + ci);
        for (std::size_t i = members.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(stream.uniform() * static_cast<double>(i));
            std::swap(members[i - 1], members[std::min(j, i - 1)]);
        }
        const auto n_train = static_cast<std::size_t>(std::llround(recipe.train_fraction * members.size()));
        for (std::size_t k = 0; k < n_train; ++k) {
            plan[members[k]].train = true;
        }
    }
    return plan;
}

json generate(const Recipe& recipe, const sensor::SensorConfig& config, std::uint64_t master_seed,
              const fs::path& out_dir, const GenerateOptions& options)
{
    config.validate();
    for (const auto& o : recipe.objects) {
        o.validate(config.gel_thickness);
    }
    const std::vector<std::string> labels = class_labels(recipe);
    const std::vector<SamplePlan> plan = plan_samples(recipe, master_seed, config.grid());

    std::vector<std::string> modalities{"tactile", "visual", "blended"};
    if (options.float_sidecar) {
        modalities.emplace_back("depth");
    }
    try {
        for (const auto& m : modalities) {
            fs::create_directories(out_dir / m);
        }
    } catch (const fs::filesystem_error& e) {
        throw std::runtime_error("cannot create output directory '" + out_dir.string() + "': " + e.what());
    }

    const sensor::Sensor sensor(config);
    std::vector<json> records(plan.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= plan.size()) {
                return;
            }
            try {
                const SamplePlan& s = plan[i];
                const scene::SceneObject& obj = recipe.objects[s.object_index];
                const sensor::SensorOutput out = sensor.capture(obj, s.pose);

                json paths;
                for (const auto& m : {"tactile", "visual", "blended"}) {
                    paths[m] = std::string(m) + "/" + s.sample_id + ".png";
                }
                io::write_png((out_dir / paths["tactile"].get<std::string>()).string(), out.tactile);
                io::write_png((out_dir / paths["visual"].get<std::string>()).string(), out.visual);
                io::write_png((out_dir / paths["blended"].get<std::string>()).string(), out.blended);
                if (options.float_sidecar) {
                    paths["depth"] = "depth/" + s.sample_id + ".stsd";
                    io::write_stsd((out_dir / paths["depth"].get<std::string>()).string(),
                                   out.load.displacement.values(), out.load.displacement.pixel_pitch());
                }

                records[i] = json{
                    {"sample_id", s.sample_id},
                    {"object_id", obj.id},
                    {"class_label", obj.class_label},
                    {"class_index", s.class_index},
                    {"split", s.train ? "train" : "val"},
                    {"pose", {{"x_m", s.pose.x}, {"y_m", s.pose.y}, {"theta_rad", s.pose.theta}}},
                    {"weight_g", obj.weight_g},
                    {"penetration_m", out.load.penetration},
                    {"total_force_n", out.load.total_force},
                    {"saturated", out.load.saturated},
                    {"contact_area_px", out.load.contact_area_px()},
                    {"paths", paths},
                };
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(plan.size());
            }
        }
    };

    unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, plan.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    json manifest{
        {"schema_version", kSchemaVersion},
        {"generator", "stsim"},
        {"recipe", recipe.name},
        {"master_seed", master_seed},
        {"samples_per_object", recipe.samples_per_object},
        {"train_fraction", recipe.train_fraction},
        {"classes", labels},
        {"sensor_config", sensor::config_to_json(config)},
        {"catalog", catalog_to_json(recipe.objects)["objects"]},
        {"samples", records},
    };

    const fs::path manifest_path = out_dir / "manifest.json";
    std::ofstream out(manifest_path, std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) {
        throw std::runtime_error("cannot write '" + manifest_path.string() + "'");
    }
    return manifest;
}

// ---------------------------------------------------------------------------

ValidationReport validate(const fs::path& manifest_path)
{
    ValidationReport report;
    auto issue = [&report](std::string msg) { report.issues.push_back(std::move(msg)); };

    json m;
    try {
        m = read_json_file(manifest_path.string());
    } catch (const std::exception& e) {
        issue(e.what());
        return report;
    }
    const fs::path root = manifest_path.parent_path();

    for (const char* key :
         {"schema_version", "master_seed", "samples_per_object", "train_fraction", "sensor_config", "catalog",
          "samples"}) {
        if (!m.contains(key)) {
            issue(std::string("manifest: missing key '") + key + "'");
        }
    }
    if (!report.clean()) {
        return report;
    }
    if (m["schema_version"] != kSchemaVersion) {
        issue("manifest: unsupported schema_version " + m["schema_version"].dump());
        return report;
    }

    sensor::SensorConfig config;
    try {
        config = sensor::config_from_json(m["sensor_config"]);
    } catch (const std::exception& e) {
        issue(std::string("sensor_config: ") + e.what());
        return report;
    }

    std::map<std::string, long long> expected_per_class;
    std::vector<scene::SceneObject> catalog;
    try {
        catalog = catalog_from_json({{"schema_version", kSchemaVersion}, {"objects", m["catalog"]}});
        for (const auto& o : catalog) {
            expected_per_class[o.class_label] += m["samples_per_object"].get<long long>();
        }
    } catch (const std::exception& e) {
        issue(std::string("catalog: ") + e.what());
    }

    const double train_fraction = m["train_fraction"].get<double>();
    std::set<std::string> ids;
    std::map<std::string, std::pair<long long, long long>> split_counts;  // class -> (train, val)

    const json& samples = m["samples"];
    if (!samples.is_array()) {
        issue("manifest: 'samples' must be an array");
        return report;
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const json& s = samples[i];
        std::string id = "#" + std::to_string(i);
        if (s.contains("sample_id") && s["sample_id"].is_string()) {
            id = s["sample_id"].get<std::string>();
        } else {
            issue("sample " + id + ": missing sample_id");
        }
        if (!ids.insert(id).second) {
            issue("sample " + id + ": duplicate sample_id");
        }

        bool complete = true;
        for (const char* key : {"object_id", "class_label", "split", "pose", "weight_g", "penetration_m",
                                "total_force_n", "paths"}) {
            if (!s.contains(key)) {
                issue("sample " + id + ": missing key '" + key + "'");
                complete = false;
            }
        }
        if (!complete) {
            continue;
        }

        const std::string label = s["class_label"].is_string() ? s["class_label"].get<std::string>() : "";
        const std::string split = s["split"].is_string() ? s["split"].get<std::string>() : "";
        if (split == "train") {
            ++split_counts[label].first;
        } else if (split == "val") {
            ++split_counts[label].second;
        } else {
            issue("sample " + id + ": split must be 'train' or 'val'");
        }
        if (!catalog.empty()) {
            const auto it = std::find_if(catalog.begin(), catalog.end(), [&](const auto& o) {
                return s["object_id"].is_string() && o.id == s["object_id"].get<std::string>();
            });
            if (it == catalog.end()) {
                issue("sample " + id + ": object_id not in catalog");
            } else if (it->class_label != label) {
                issue("sample " + id + ": class_label disagrees with catalog");
            }
        }

        const json& pen = s["penetration_m"];
        if (!pen.is_number() || !(pen.get<double>() >= 0.0) || pen.get<double>() > config.gel_thickness) {
            issue("sample " + id + ": penetration_m " + pen.dump() + " outside [0, gel_thickness "
                  + std::to_string(config.gel_thickness) + "]");
        }
        const json& force = s["total_force_n"];
        if (!force.is_number() || !(force.get<double>() >= 0.0) || !std::isfinite(force.get<double>())) {
            issue("sample " + id + ": total_force_n must be finite and non-negative");
        }
        const json& pose = s["pose"];
        for (const char* key : {"x_m", "y_m", "theta_rad"}) {
            if (!pose.contains(key) || !pose[key].is_number() || !std::isfinite(pose[key].get<double>())) {
                issue("sample " + id + ": pose." + key + " missing or not finite");
            }
        }

        const json& paths = s["paths"];
        for (const char* modality : {"tactile", "visual", "blended"}) {
            if (!paths.contains(modality) || !paths[modality].is_string()) {
                issue("sample " + id + ": missing " + modality + " path");
                continue;
            }
            const fs::path file = root / paths[modality].get<std::string>();
            if (!fs::exists(file)) {
                issue("sample " + id + ": " + modality + " file missing (" + paths[modality].get<std::string>() + ")");
                continue;
            }
            try {
                const io::Rgb8Image img = io::read_png(file.string());
                if (img.width != config.width || img.height != config.height) {
                    issue("sample " + id + ": " + modality + " image is " + std::to_string(img.width) + "x"
                          + std::to_string(img.height) + ", expected " + std::to_string(config.width) + "x"
                          + std::to_string(config.height));
                }
            } catch (const std::exception& e) {
                issue("sample " + id + ": " + modality + " does not decode: " + e.what());
            }
        }
        if (paths.contains("depth")) {
            const fs::path file = root / paths["depth"].get<std::string>();
            try {
                const io::RawDepth d = io::read_stsd(file.string());
                if (d.depth.width() != config.width || d.depth.height() != config.height) {
                    issue("sample " + id + ": depth sidecar resolution mismatch");
                }
            } catch (const std::exception& e) {
                issue("sample " + id + ": depth sidecar unreadable: " + e.what());
            }
        }
    }

    for (const auto& [label, expected] : expected_per_class) {
        const auto [train, val] = split_counts[label];
        if (train + val != expected) {
            issue("class " + label + ": " + std::to_string(train + val) + " samples, expected "
                  + std::to_string(expected));
        }
        const double target = train_fraction * static_cast<double>(train + val);
        if (std::abs(static_cast<double>(train) - target) > 1.0) {
            issue("class " + label + ": " + std::to_string(train) + " train samples, expected "
                  + std::to_string(std::llround(target)) + " +/- 1");
        }
    }
    for (const auto& [label, counts] : split_counts) {
        if (!expected_per_class.empty() && !expected_per_class.contains(label)) {
            issue("class " + label + ": not in catalog");
        }
    }
    return report;
}

}  // namespace stsim::dataset
