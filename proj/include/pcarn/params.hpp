// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCARN_PARAMS_HPP
#define PCARN_PARAMS_HPP

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcarn/autodiff.hpp"
#include "pcarn/tensor.hpp"

namespace pcarn {

// Named, ordered collection of learnable tensors. Aliases implement weight
// tying: an aliased name resolves to its canonical tensor and is never
// counted or updated twice. Registration order is the serialization and
// iteration order, so models built from the same spec are bit-identical.
class ParamStore {
public:
    struct Entry {
        std::string name;
        Tensor value;
        Tensor grad; // empty until a step populates it
    };

    Tensor& create(const std::string& name, Tensor init);
    void alias(const std::string& name, const std::string& canonical);

    bool has(const std::string& name) const;
    bool is_alias(const std::string& name) const;
    const std::string& canonical_name(const std::string& name) const;
    Tensor& value(const std::string& name);
    const Tensor& value(const std::string& name) const;

    std::vector<Entry>& entries() { return entries_; }
    const std::vector<Entry>& entries() const { return entries_; }
    const std::map<std::string, std::string>& aliases() const { return aliases_; }

    // Total scalar count over canonical entries (tying counted once).
    int64_t param_count() const;
    void zero_grads();

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, size_t> index_;
    std::map<std::string, std::string> aliases_;
};

// Bridges a ParamStore into one define-by-run graph: the first access to a
// canonical parameter creates its leaf Var, later accesses (including via
// aliases) return the same node, so tied call sites accumulate gradients
// into one buffer. collect_grads copies leaf grads back into the store.
class ParamBinding {
public:
    explicit ParamBinding(ParamStore& store, bool trainable = true)
        : store_(&store), trainable_(trainable) {}

    Var operator()(const std::string& name);
    void collect_grads();
    ParamStore& store() { return *store_; }

private:
    ParamStore* store_;
    bool trainable_;
    std::unordered_map<std::string, Var> leaves_;
};

} // namespace pcarn

#endif
