#include "hmr/registry.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace hmr {

AcupointRegistry AcupointRegistry::make_default(int cardinality) {
    AcupointRegistry reg;
    for (int id = 0; id < cardinality; ++id) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "acupoint_%02d", id);
        reg.entries_[id] = Entry{buf, {}};
    }
    // ST36 (Zusanli) is the one point the source material names.
    if (cardinality > 36) {
        reg.entries_[36] = Entry{"Zusanli", {"acupoint_36", "ST36"}};
    }
    reg.index_names();
    return reg;
}

AcupointRegistry AcupointRegistry::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RegistryError("cannot open registry file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw RegistryError("registry parse error in " + path + ": " + e.what());
    }
    AcupointRegistry reg;
    for (auto it = j.begin(); it != j.end(); ++it) {
        int id = std::stoi(it.key());
        if (id < 0) throw RegistryError("negative acupoint id: " + it.key());
        Entry entry;
        entry.name = it.value().at("name").get<std::string>();
        if (entry.name.empty()) throw RegistryError("empty name for id " + it.key());
        if (it.value().contains("aliases"))
            entry.aliases = it.value()["aliases"].get<std::vector<std::string>>();
        if (!reg.entries_.emplace(id, std::move(entry)).second)
            throw RegistryError("duplicate acupoint id: " + it.key());
    }
    reg.index_names();
    return reg;
}

const std::string& AcupointRegistry::name_of(int id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw RegistryError("unknown acupoint id " + std::to_string(id));
    return it->second.name;
}

int AcupointRegistry::resolve(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? -1 : it->second;
}

void AcupointRegistry::index_names() {
    by_name_.clear();
    for (const auto& [id, entry] : entries_) {
        if (!by_name_.emplace(entry.name, id).second)
            throw RegistryError("duplicate acupoint name: " + entry.name);
        for (const auto& alias : entry.aliases) by_name_.emplace(alias, id);
    }
}

} // namespace hmr
