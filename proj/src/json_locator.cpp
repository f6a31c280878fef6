#include "stsim/json_locator.h"

#include <cstring>

namespace stsim {

namespace {

class Scanner {
public:
    Scanner(std::string_view text, std::map<std::string, int>& lines) : text_(text), lines_(lines) {}

    void run()
    {
        skip_ws();
        value("");
    }

private:
    void skip_ws()
    {
        while (pos_ < text_.size() && std::strchr(" \t\r\n", text_[pos_]) != nullptr) {
            if (text_[pos_] == '\n') {
                ++line_;
            }
            ++pos_;
        }
    }

    std::string string_token()
    {
        std::string out;
        ++pos_;  // opening quote
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                ++pos_;
            }
            out.push_back(text_[pos_++]);
        }
        ++pos_;  // closing quote
        return out;
    }

    void value(const std::string& ptr)
    {
        skip_ws();
        if (pos_ >= text_.size()) {
            return;
        }
        lines_.emplace(ptr, line_);
        const char c = text_[pos_];
        if (c == '{') {
            ++pos_;
            for (;;) {
                skip_ws();
                if (pos_ >= text_.size() || text_[pos_] == '}') {
                    ++pos_;
                    return;
                }
                if (text_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                const std::string key = string_token();
                skip_ws();
                ++pos_;  // ':'
                value(ptr + "/" + json_pointer_escape(key));
            }
        } else if (c == '[') {
            ++pos_;
            std::size_t index = 0;
            for (;;) {
                skip_ws();
                if (pos_ >= text_.size() || text_[pos_] == ']') {
                    ++pos_;
                    return;
                }
                if (text_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                value(ptr + "/" + std::to_string(index++));
            }
        } else if (c == '"') {
            string_token();
        } else {
            while (pos_ < text_.size() && std::strchr(",]} \t\r\n", text_[pos_]) == nullptr) {
                ++pos_;
            }
        }
    }

    std::string_view text_;
    std::map<std::string, int>& lines_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

}  // namespace

std::string json_pointer_escape(std::string_view key)
{
    std::string out;
    for (char ch : key) {
        if (ch == '~') {
            out += "~0";
        } else if (ch == '/') {
            out += "~1";
        } else {
            out.push_back(ch);
        }
    }
    return out;
}

JsonLocator::JsonLocator(std::string_view text)
{
    Scanner(text, lines_).run();
}

int JsonLocator::line_of(std::string pointer) const
{
    for (;;) {
        if (auto it = lines_.find(pointer); it != lines_.end()) {
            return it->second;
        }
        if (pointer.empty()) {
            return 0;
        }
        pointer.erase(pointer.rfind('/'));
    }
}

}  // namespace stsim
