#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stsim {

/// Maps JSON pointers ("/objects/2/shape") to the 1-based source line where
/// the value starts. Expects text that already parsed as valid JSON.
class JsonLocator {
public:
    explicit JsonLocator(std::string_view text);

    /// Line of the value at `pointer`, falling back to the nearest recorded
    /// ancestor; 0 when nothing matches.
    int line_of(std::string pointer) const;

private:
    std::map<std::string, int> lines_;
};

/// Schema violation at a JSON pointer inside a document.
class SchemaError : public std::invalid_argument {
public:
    SchemaError(std::string pointer, const std::string& what)
        : std::invalid_argument(what), pointer_(std::move(pointer))
    {
    }

    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

std::string json_pointer_escape(std::string_view key);

}  // namespace stsim
