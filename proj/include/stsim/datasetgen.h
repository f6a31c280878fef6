#pragma once

#include "stsim/scene.h"
#include "stsim/sensor.h"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace stsim::dataset {

inline constexpr int kSchemaVersion = 1;

/// Parse a catalog document ({"schema_version": 1, "objects": [...]}).
/// Violations throw SchemaError carrying the JSON pointer of the culprit.
std::vector<scene::SceneObject> catalog_from_json(const nlohmann::json& j);
nlohmann::json catalog_to_json(const std::vector<scene::SceneObject>& objects);
scene::SceneObject object_from_json(const nlohmann::json& j, const std::string& pointer);
nlohmann::json object_to_json(const scene::SceneObject& obj);

/// Reads a JSON file, reporting parse and schema errors as "path:line: ...".
nlohmann::json read_json_file(const std::string& path);

struct Recipe {
    std::string name;
    std::vector<scene::SceneObject> objects;
    int samples_per_object = 1;
    double train_fraction = 0.8;
};

/// `household`, `texture` or `fill`.
Recipe builtin_recipe(const std::string& name);
bool is_builtin_recipe(const std::string& name);

/// Custom recipe file. Objects come inline under "objects" or from a
/// catalog file named by "catalog", resolved relative to the recipe.
Recipe load_recipe(const std::string& path);

/// Built-in name or path to a recipe file.
Recipe resolve_recipe(const std::string& name_or_path);

/// Looks an object up across the built-in catalogs.
scene::SceneObject builtin_object(const std::string& id);

struct SamplePlan {
    std::string sample_id;
    std::size_t object_index = 0;
    std::size_t class_index = 0;
    scene::Pose pose;
    bool train = true;
};

/// Deterministic sample list: ids, poses from per-sample streams keyed by
/// (master_seed, sample index), stratified train/val split per class.
std::vector<SamplePlan> plan_samples(const Recipe& recipe, std::uint64_t master_seed, const scene::SensorGrid& grid);

/// Distinct class labels in first-appearance order.
std::vector<std::string> class_labels(const Recipe& recipe);

struct GenerateOptions {
    bool float_sidecar = false;  ///< also write STSD penetration maps
    unsigned threads = 0;        ///< 0: hardware concurrency
};

/// Render every planned sample into out_dir and write out_dir/manifest.json.
/// Returns the manifest document.
nlohmann::json generate(const Recipe& recipe, const sensor::SensorConfig& config, std::uint64_t master_seed,
                        const std::filesystem::path& out_dir, const GenerateOptions& options = {});

struct ValidationReport {
    std::vector<std::string> issues;

    bool clean() const { return issues.empty(); }
};

/// Check a manifest and the files it references.
ValidationReport validate(const std::filesystem::path& manifest_path);

}  // namespace stsim::dataset
