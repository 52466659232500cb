#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmr {

struct RegistryError : std::runtime_error {
    explicit RegistryError(const std::string& what) : std::runtime_error(what) {}
};

/// Acupoint id -> canonical name (plus aliases). The default registry ships 60
/// numbered points; real names can be loaded from a JSON override file.
class AcupointRegistry {
public:
    struct Entry {
        std::string name;
        std::vector<std::string> aliases;
    };

    /// 60 placeholder entries ("acupoint_00".."acupoint_59"), with id 36
    /// canonically named Zusanli.
    static AcupointRegistry make_default(int cardinality = 60);

    /// JSON map {"id": {"name": str, "aliases": [str]}}.
    static AcupointRegistry load(const std::string& path);

    /// Canonical name for an id. Throws RegistryError on unknown id.
    const std::string& name_of(int id) const;

    /// Id for a canonical name or alias; -1 when unknown.
    int resolve(const std::string& name) const;

    bool contains(int id) const { return entries_.count(id) != 0; }
    size_t size() const { return entries_.size(); }
    const std::map<int, Entry>& entries() const { return entries_; }

private:
    void index_names();

    std::map<int, Entry> entries_;
    std::map<std::string, int> by_name_;
};

} // namespace hmr
