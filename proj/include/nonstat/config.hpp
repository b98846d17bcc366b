// Nested plain-text key/value configuration.
//
// Syntax: `key = value` entries, `name { ... }` blocks, `#` comments.
// Unknown keys are hard errors: a typo must fail the run, not silently
// change the experiment.

#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nonstat {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigNode {
    std::map<std::string, std::string> values;
    std::map<std::string, ConfigNode> children;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline ConfigNode parse_config_text(const std::string& text) {
    ConfigNode root;
    std::vector<ConfigNode*> stack = {&root};
    std::istringstream in(text);
    std::string raw;
    long line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;
        const std::string where = " (line " + std::to_string(line_no) + ")";
        if (line == "}") {
            if (stack.size() == 1) throw ConfigError("unmatched '}'" + where);
            stack.pop_back();
            continue;
        }
        if (line.back() == '{') {
            const std::string name = detail::trim(line.substr(0, line.size() - 1));
            if (name.empty() || name.find('=') != std::string::npos)
                throw ConfigError("malformed block header" + where);
            ConfigNode& parent = *stack.back();
            if (parent.children.count(name)) throw ConfigError("duplicate block '" + name + "'" + where);
            stack.push_back(&parent.children[name]);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'" + where);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key" + where);
        ConfigNode& parent = *stack.back();
        if (parent.values.count(key)) throw ConfigError("duplicate key '" + key + "'" + where);
        parent.values[key] = value;
    }
    if (stack.size() != 1) throw ConfigError("unterminated block at end of file");
    return root;
}

inline ConfigNode load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// Typed accessor that records which keys were read; finish() rejects
/// anything left over.
class ConfigBinder {
public:
    explicit ConfigBinder(const ConfigNode& node, std::string path = "")
        : node_(&node), path_(std::move(path)) {}

    bool has(const std::string& key) const { return node_->values.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback = "") {
        consumed_.insert(key);
        const auto it = node_->values.find(key);
        return it == node_->values.end() ? fallback : it->second;
    }

    std::string require_string(const std::string& key) {
        if (!has(key)) throw ConfigError("missing required key '" + qualify(key) + "'");
        return get_string(key);
    }

    double get_double(const std::string& key, double fallback) {
        if (!has(key)) {
            consumed_.insert(key);
            return fallback;
        }
        return parse_double(key, get_string(key));
    }

    long get_long(const std::string& key, long fallback) {
        if (!has(key)) {
            consumed_.insert(key);
            return fallback;
        }
        const std::string v = get_string(key);
        try {
            std::size_t pos = 0;
            const long out = std::stol(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw ConfigError("key '" + qualify(key) + "': expected integer, got '" + v + "'");
        }
    }

    bool get_bool(const std::string& key, bool fallback) {
        if (!has(key)) {
            consumed_.insert(key);
            return fallback;
        }
        const std::string v = get_string(key);
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw ConfigError("key '" + qualify(key) + "': expected true/false, got '" + v + "'");
    }

    std::vector<long> get_longs(const std::string& key, std::vector<long> fallback = {}) {
        if (!has(key)) {
            consumed_.insert(key);
            return fallback;
        }
        std::istringstream in(get_string(key));
        std::vector<long> out;
        std::string tok;
        while (in >> tok) {
            try {
                std::size_t pos = 0;
                out.push_back(std::stol(tok, &pos));
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ConfigError("key '" + qualify(key) + "': expected integer list");
            }
        }
        return out;
    }

    ConfigBinder& child(const std::string& name) {
        auto it = child_binders_.find(name);
        if (it == child_binders_.end()) {
            static const ConfigNode empty;
            const auto cit = node_->children.find(name);
            const ConfigNode& sub = cit == node_->children.end() ? empty : cit->second;
            it = child_binders_
                     .emplace(name, std::make_unique<ConfigBinder>(sub, qualify(name)))
                     .first;
        }
        return *it->second;
    }

    /// Throws listing every key or block that no reader consumed.
    void finish() const {
        std::vector<std::string> unknown;
        collect_unknown(unknown);
        if (!unknown.empty()) {
            std::string msg = "unknown config key(s):";
            for (const auto& k : unknown) msg += " '" + k + "'";
            throw ConfigError(msg);
        }
    }

private:
    std::string qualify(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    double parse_double(const std::string& key, const std::string& v) const {
        try {
            std::size_t pos = 0;
            const double out = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw ConfigError("key '" + qualify(key) + "': expected number, got '" + v + "'");
        }
    }

    void collect_unknown(std::vector<std::string>& out) const {
        for (const auto& [k, v] : node_->values)
            if (!consumed_.count(k)) out.push_back(qualify(k));
        for (const auto& [k, sub] : node_->children) {
            const auto it = child_binders_.find(k);
            if (it == child_binders_.end()) {
                out.push_back(qualify(k) + " { }");
            } else {
                it->second->collect_unknown(out);
            }
        }
    }

    const ConfigNode* node_;
    std::string path_;
    std::set<std::string> consumed_;
    std::map<std::string, std::unique_ptr<ConfigBinder>> child_binders_;
};

}  // namespace nonstat
