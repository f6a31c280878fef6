#include "stsim/datasetgen.h"
#include "stsim/image_io.h"
#include "stsim/json_locator.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>

using namespace stsim;
using namespace stsim::dataset;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

sensor::SensorConfig tiny_config()
{
    return sensor::resample(sensor::SensorConfig{}, 24, 24);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Workdir : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("stsim_ds_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& body) const
    {
        std::ofstream(dir_ / name) << body;
        return dir_ / name;
    }

    fs::path dir_;
};

Recipe small_fill()
{
    Recipe r = builtin_recipe("fill");
    r.samples_per_object = 5;
    return r;
}

bool mentions(const ValidationReport& r, const std::string& needle)
{
    for (const auto& s : r.issues) {
        if (s.find(needle) != std::string::npos) return true;
    }
    return false;
}

}  // namespace

TEST(BuiltinRecipes, PlanCounts)
{
    const scene::SensorGrid grid = sensor::SensorConfig{}.grid();
    struct Expect {
        const char* name;
        std::size_t classes;
        std::size_t per_class;
        std::size_t train_per_class;
    };
    for (const Expect& e : {Expect{"household", 10, 600, 420}, Expect{"texture", 6, 100, 80},
                            Expect{"fill", 3, 120, 96}}) {
        const Recipe r = builtin_recipe(e.name);
        const auto plan = plan_samples(r, 11, grid);
        EXPECT_EQ(class_labels(r).size(), e.classes) << e.name;
        EXPECT_EQ(plan.size(), e.classes * e.per_class) << e.name;
        std::map<std::size_t, std::pair<std::size_t, std::size_t>> counts;
        for (const auto& s : plan) {
            auto& [total, train] = counts[s.class_index];
            ++total;
            train += s.train;
        }
        ASSERT_EQ(counts.size(), e.classes);
        for (const auto& [ci, c] : counts) {
            EXPECT_EQ(c.first, e.per_class) << e.name << " class " << ci;
            EXPECT_EQ(c.second, e.train_per_class) << e.name << " class " << ci;
        }
    }
}

TEST(BuiltinRecipes, FillLevelsShareGeometry)
{
    const Recipe r = builtin_recipe("fill");
    ASSERT_EQ(r.objects.size(), 3u);
    for (const auto& o : r.objects) {
        EXPECT_EQ(object_to_json(o)["shape"], object_to_json(r.objects[0])["shape"]);
        EXPECT_EQ(object_to_json(o)["albedo"], object_to_json(r.objects[0])["albedo"]);
    }
    EXPECT_EQ(r.objects[0].weight_g, 446.0);
    EXPECT_EQ(r.objects[1].weight_g, 823.0);
    EXPECT_EQ(r.objects[2].weight_g, 1133.0);
    EXPECT_THROW(builtin_recipe("kitchen"), std::invalid_argument);
    EXPECT_EQ(builtin_object("lemon").class_label, "lemon");
}

TEST(PlanSamples, DeterministicAndSeedSensitive)
{
    const Recipe r = builtin_recipe("texture");
    const scene::SensorGrid grid = sensor::SensorConfig{}.grid();
    const auto a = plan_samples(r, 5, grid);
    const auto b = plan_samples(r, 5, grid);
    const auto c = plan_samples(r, 6, grid);
    ASSERT_EQ(a.size(), b.size());
    int differ = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].sample_id, b[i].sample_id);
        EXPECT_EQ(a[i].pose, b[i].pose);
        EXPECT_EQ(a[i].train, b[i].train);
        differ += !(a[i].pose == c[i].pose);
    }
    EXPECT_EQ(a[0].sample_id, "texture_000000");
    EXPECT_EQ(differ, static_cast<int>(a.size()));
}

TEST(PlanSamples, PosesKeepFootprintOnSensor)
{
    const Recipe r = builtin_recipe("household");
    const scene::SensorGrid grid = sensor::SensorConfig{}.grid();
    for (const auto& s : plan_samples(r, 1, grid)) {
        const double reach = r.objects[s.object_index].footprint_radius();
        const double half = 0.075;
        if (reach < half) {
            EXPECT_LE(std::abs(s.pose.x) + reach, half + 1e-12) << s.sample_id;
            EXPECT_LE(std::abs(s.pose.y) + reach, half + 1e-12) << s.sample_id;
        }
    }
}

TEST(Catalog, JsonRoundTrip)
{
    const Recipe r = builtin_recipe("household");
    const json j = catalog_to_json(r.objects);
    const auto back = catalog_from_json(j);
    EXPECT_EQ(catalog_to_json(back), j);
}

TEST(Catalog, SchemaErrorsCarryPointers)
{
    json j = catalog_to_json(builtin_recipe("fill").objects);
    j["objects"][1]["shape"]["radius_m"] = -1;
    try {
        catalog_from_json(j);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.pointer(), "/objects/1/shape/radius_m");
    }
    j = catalog_to_json(builtin_recipe("fill").objects);
    j["objects"][2]["id"] = "bottle_empty";
    try {
        catalog_from_json(j);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.pointer(), "/objects/2/id");
    }
    j = catalog_to_json(builtin_recipe("fill").objects);
    j["objects"][0]["colour"] = "red";
    try {
        catalog_from_json(j);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.pointer(), "/objects/0/colour");
    }
}

TEST(JsonLocatorTest, MapsPointersToLines)
{
    const std::string text = "{\n"
                             "  \"a\": 1,\n"
                             "  \"b\": [\n"
                             "    {\"c\": 2},\n"
                             "    {\n"
                             "      \"d/e\": 3\n"
                             "    }\n"
                             "  ]\n"
                             "}\n";
    const JsonLocator loc(text);
    EXPECT_EQ(loc.line_of(""), 1);
    EXPECT_EQ(loc.line_of("/a"), 2);
    EXPECT_EQ(loc.line_of("/b"), 3);
    EXPECT_EQ(loc.line_of("/b/0/c"), 4);
    EXPECT_EQ(loc.line_of("/b/1"), 5);
    EXPECT_EQ(loc.line_of("/b/1/d~1e"), 6);
    // Missing leaves fall back to the nearest ancestor.
    EXPECT_EQ(loc.line_of("/b/1/zzz"), 5);
    EXPECT_EQ(json_pointer_escape("d/e~f"), "d~1e~0f");
}

using RecipeFile = Workdir;

TEST_F(RecipeFile, InlineObjects)
{
    const fs::path p = write("r.json", R"({
  "schema_version": 1,
  "name": "pair",
  "samples_per_object": 3,
  "train_fraction": 0.5,
  "objects": [
    {"id": "a", "class_label": "x", "weight_g": 50, "shape": {"type": "sphere", "radius_m": 0.02}},
    {"id": "b", "class_label": "y", "weight_g": 50, "shape": {"type": "box", "size_m": [0.02, 0.03]}}
  ]
})");
    const Recipe r = resolve_recipe(p.string());
    EXPECT_EQ(r.name, "pair");
    EXPECT_EQ(r.objects.size(), 2u);
    EXPECT_EQ(r.samples_per_object, 3);
}

TEST_F(RecipeFile, CatalogResolvedRelativeToRecipe)
{
    fs::create_directories(dir_ / "cat");
    std::ofstream(dir_ / "cat" / "objs.json") << catalog_to_json(builtin_recipe("texture").objects).dump(2);
    const fs::path p = write("r.json", R"({"schema_version": 1, "name": "t", "samples_per_object": 2,
                                          "train_fraction": 0.5, "catalog": "cat/objs.json"})");
    EXPECT_EQ(load_recipe(p.string()).objects.size(), 6u);
}

TEST_F(RecipeFile, SchemaErrorReportsLine)
{
    const fs::path p = write("r.json", "{\n"
                                       "  \"schema_version\": 1,\n"
                                       "  \"name\": \"bad\",\n"
                                       "  \"samples_per_object\": 3,\n"
                                       "  \"train_fraction\": 0.5,\n"
                                       "  \"objects\": [\n"
                                       "    {\"id\": \"a\", \"class_label\": \"x\", \"weight_g\": 50,\n"
                                       "     \"shape\": {\"type\": \"pyramid\"}}\n"
                                       "  ]\n"
                                       "}\n");
    try {
        load_recipe(p.string());
        FAIL();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find(p.string() + ":8:"), std::string::npos) << msg;
        EXPECT_NE(msg.find("/objects/0/shape/type"), std::string::npos) << msg;
        EXPECT_NE(msg.find("pyramid"), std::string::npos) << msg;
    }
}

TEST_F(RecipeFile, ParseErrorReportsLine)
{
    const fs::path p = write("r.json", "{\n  \"name\": \"x\",\n  \"samples_per_object\": ,\n}\n");
    try {
        load_recipe(p.string());
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find(p.string() + ":3:"), std::string::npos) << e.what();
    }
}

using Generate = Workdir;

TEST_F(Generate, WritesValidDataset)
{
    const json m = generate(small_fill(), tiny_config(), 9, dir_, {false, 1});
    EXPECT_EQ(m["samples"].size(), 15u);
    EXPECT_EQ(m["classes"], json({"empty", "half_full", "full"}));
    const ValidationReport r = validate(dir_ / "manifest.json");
    EXPECT_TRUE(r.clean()) << (r.issues.empty() ? "" : r.issues[0]);

    const json& s = m["samples"][0];
    const io::Rgb8Image img = io::read_png((dir_ / s["paths"]["tactile"].get<std::string>()).string());
    EXPECT_EQ(img.width, 24);
    EXPECT_EQ(img.height, 24);
    EXPECT_EQ(json::parse(slurp(dir_ / "manifest.json")), m);
    EXPECT_EQ(slurp(dir_ / "manifest.json"), m.dump(2) + "\n");
}

TEST_F(Generate, ThreadCountDoesNotChangeOutput)
{
    generate(small_fill(), tiny_config(), 4, dir_ / "one", {true, 1});
    generate(small_fill(), tiny_config(), 4, dir_ / "three", {true, 3});
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir_ / "one")) {
        if (!e.is_regular_file()) continue;
        const fs::path rel = fs::relative(e.path(), dir_ / "one");
        EXPECT_EQ(slurp(e.path()), slurp(dir_ / "three" / rel)) << rel;
        ++files;
    }
    EXPECT_EQ(files, 15u * 4 + 1);
    EXPECT_TRUE(validate(dir_ / "three" / "manifest.json").clean());
}

TEST_F(Generate, MissingFileIsReportedBySampleId)
{
    const json m = generate(small_fill(), tiny_config(), 2, dir_, {false, 1});
    const std::string id = m["samples"][7]["sample_id"];
    fs::remove(dir_ / m["samples"][7]["paths"]["visual"].get<std::string>());
    const ValidationReport r = validate(dir_ / "manifest.json");
    ASSERT_FALSE(r.clean());
    EXPECT_TRUE(mentions(r, id)) << r.issues[0];
    EXPECT_TRUE(mentions(r, "visual"));
}

TEST_F(Generate, TamperedManifestIsFlagged)
{
    json m = generate(small_fill(), tiny_config(), 2, dir_, {false, 1});
    m["samples"][3]["penetration_m"] = 0.02;
    m["samples"][4]["split"] = "test";
    m["samples"][5]["class_label"] = "full";
    std::ofstream(dir_ / "manifest.json") << m.dump(2);
    const ValidationReport r = validate(dir_ / "manifest.json");
    EXPECT_TRUE(mentions(r, m["samples"][3]["sample_id"].get<std::string>() + ": penetration_m"));
    EXPECT_TRUE(mentions(r, m["samples"][4]["sample_id"].get<std::string>() + ": split"));
    EXPECT_TRUE(mentions(r, m["samples"][5]["sample_id"].get<std::string>() + ": class_label"));
}

TEST_F(Generate, WrongResolutionIsFlagged)
{
    generate(small_fill(), tiny_config(), 2, dir_, {false, 1});
    json m = json::parse(slurp(dir_ / "manifest.json"));
    m["sensor_config"]["resolution"] = {32, 32};
    std::ofstream(dir_ / "manifest.json") << m.dump(2);
    EXPECT_TRUE(mentions(validate(dir_ / "manifest.json"), "24x24"));
}

TEST_F(Generate, DroppedSampleBreaksClassCount)
{
    json m = generate(small_fill(), tiny_config(), 2, dir_, {false, 1});
    m["samples"].erase(0);
    std::ofstream(dir_ / "manifest.json") << m.dump(2);
    EXPECT_TRUE(mentions(validate(dir_ / "manifest.json"), "class empty"));
}

TEST_F(Generate, UnreadableManifest)
{
    write("manifest.json", "{ not json");
    EXPECT_FALSE(validate(dir_ / "manifest.json").clean());
    EXPECT_FALSE(validate(dir_ / "absent.json").clean());
}
