// SPDX-License-Identifier: Apache-2.0
#include "deshadow/train/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "deshadow/error.hpp"

namespace deshadow::train {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'D', 'S', 'H', 'D', 'C', 'K', 'P', 'T'};

class Writer {
public:
    template <class U>
    void pod(U v) {
        out_.append(reinterpret_cast<const char*>(&v), sizeof v);
    }
    void str(const std::string& s) {
        pod(static_cast<std::uint32_t>(s.size()));
        out_ += s;
    }
    void tensor(const std::string& name, const nn::Tensor<float>& t) {
        str(name);
        pod(static_cast<std::uint32_t>(t.rank()));
        for (int e : t.shape()) pod(static_cast<std::uint32_t>(e));
        out_.append(reinterpret_cast<const char*>(t.ptr()), t.size() * sizeof(float));
    }
    void raw(const char* p, std::size_t n) { out_.append(p, n); }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    void need(std::size_t n, const char* what) const {
        if (bytes_.size() - pos_ < n)
            throw DataError(std::string("checkpoint truncated while reading ") + what + " at byte " +
                            std::to_string(pos_));
    }
    template <class U>
    U pod(const char* what) {
        need(sizeof(U), what);
        U v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof v);
        pos_ += sizeof v;
        return v;
    }
    std::string str(const char* what) {
        const auto n = pod<std::uint32_t>(what);
        need(n, what);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    NamedTensor tensor() {
        NamedTensor nt;
        nt.name = str("tensor name");
        const auto rank = pod<std::uint32_t>("tensor rank");
        if (rank == 0 || rank > 8) throw DataError("checkpoint tensor '" + nt.name + "' has invalid rank");
        nn::Shape shape;
        std::size_t numel = 1;
        for (std::uint32_t i = 0; i < rank; ++i) {
            const auto e = pod<std::uint32_t>("tensor extent");
            if (e == 0 || e > (1u << 28)) throw DataError("checkpoint tensor '" + nt.name + "' has invalid extent");
            shape.push_back(static_cast<int>(e));
            numel *= e;
        }
        need(numel * sizeof(float), "tensor values");
        std::vector<float> values(numel);
        std::memcpy(values.data(), bytes_.data() + pos_, numel * sizeof(float));
        pos_ += numel * sizeof(float);
        nt.value = nn::Tensor<float>(shape, std::move(values));
        return nt;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

private:
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return kv;
}

std::uint64_t fnv(std::uint64_t h, const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t feed_param(std::uint64_t h, const std::string& name, const nn::Tensor<float>& t) {
    h = fnv(h, name.data(), name.size());
    for (int e : t.shape()) h = fnv(h, &e, sizeof e);
    return fnv(h, t.ptr(), t.size() * sizeof(float));
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.pod(kCheckpointVersion);
    w.str(arch::serialize(ckpt.arch));
    std::ostringstream meta;
    meta << "phase = " << to_string(ckpt.phase) << '\n'
         << "aggregation = " << model::to_string(ckpt.aggregation) << '\n'
         << "seed = " << ckpt.seed << '\n'
         << "step = " << ckpt.step << '\n'
         << "adam_step = " << ckpt.adam_step << '\n'
         << "rng = " << ckpt.rng_state << '\n';
    w.str(meta.str());
    w.pod(static_cast<std::uint32_t>(ckpt.params.size()));
    for (const auto& p : ckpt.params) w.tensor(p.name, p.value);
    w.pod(static_cast<std::uint32_t>(2 * ckpt.moments.size()));
    for (const auto& [name, m] : ckpt.moments) {
        w.tensor("m/" + name, m.m);
        w.tensor("v/" + name, m.v);
    }
    w.pod(static_cast<std::uint32_t>(ckpt.trace.size()));
    for (const auto& r : ckpt.trace) {
        w.pod(r.step);
        w.pod(r.loss);
        w.pod(r.rmse_shadow);
        w.pod(r.rmse_nonshadow);
    }
    return w.take();
}

Checkpoint decode_checkpoint(const std::string& bytes) {
    Reader r(bytes);
    r.need(sizeof kMagic, "magic");
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw DataError("not a checkpoint: bad magic");
    for (std::size_t i = 0; i < sizeof kMagic; ++i) r.pod<char>("magic");
    const auto version = r.pod<std::uint32_t>("version");
    if (version != kCheckpointVersion)
        throw DataError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                        std::to_string(kCheckpointVersion) + ")");

    Checkpoint ckpt;
    ckpt.arch = arch::parse_arch(r.str("arch spec"));
    const auto meta = parse_kv(r.str("metadata"));
    auto field = [&](const char* key) {
        const auto it = meta.find(key);
        if (it == meta.end()) throw DataError(std::string("checkpoint metadata lacks '") + key + "'");
        return it->second;
    };
    try {
        ckpt.phase = parse_phase(field("phase"));
        ckpt.aggregation = model::parse_aggregation(field("aggregation"));
        ckpt.seed = std::stoull(field("seed"));
        ckpt.step = std::stoll(field("step"));
        ckpt.adam_step = std::stoll(field("adam_step"));
    } catch (const ContractViolation& e) {
        throw DataError(std::string("checkpoint metadata: ") + e.what());
    } catch (const std::logic_error&) {
        throw DataError("checkpoint metadata holds a malformed number");
    }
    ckpt.rng_state = field("rng");

    const auto n_params = r.pod<std::uint32_t>("parameter count");
    for (std::uint32_t i = 0; i < n_params; ++i) ckpt.params.push_back(r.tensor());
    const auto n_moments = r.pod<std::uint32_t>("moment count");
    for (std::uint32_t i = 0; i < n_moments; ++i) {
        NamedTensor t = r.tensor();
        if (t.name.starts_with("m/"))
            ckpt.moments[t.name.substr(2)].m = std::move(t.value);
        else if (t.name.starts_with("v/"))
            ckpt.moments[t.name.substr(2)].v = std::move(t.value);
        else
            throw DataError("checkpoint moment record '" + t.name + "' has no m/ or v/ prefix");
    }
    const auto n_trace = r.pod<std::uint32_t>("trace length");
    for (std::uint32_t i = 0; i < n_trace; ++i) {
        TraceRecord rec;
        rec.step = r.pod<std::int64_t>("trace step");
        rec.loss = r.pod<double>("trace loss");
        rec.rmse_shadow = r.pod<double>("trace rmse");
        rec.rmse_nonshadow = r.pod<double>("trace rmse");
        ckpt.trace.push_back(rec);
    }
    if (!r.at_end()) throw DataError("checkpoint has trailing bytes");
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const std::string bytes = encode_checkpoint(ckpt);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw DataError("cannot open '" + tmp.string() + "' for writing");
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!os) throw DataError("failed writing checkpoint '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open checkpoint '" + path.string() + "'");
    const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    try {
        return decode_checkpoint(bytes);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::uint64_t params_digest(const Checkpoint& ckpt) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& p : ckpt.params) h = feed_param(h, p.name, p.value);
    return h;
}

std::uint64_t params_digest(const nn::ParameterStore<float>& params, const std::string& prefix) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& p : params.items())
        if (p->name().starts_with(prefix)) h = feed_param(h, p->name(), p->value());
    return h;
}

Checkpoint capture(const model::DualBranchNet<float>& net, Phase phase, std::uint64_t seed) {
    Checkpoint ckpt;
    ckpt.arch = net.spec();
    ckpt.phase = phase;
    ckpt.aggregation = net.mode();
    ckpt.seed = seed;
    for (const auto& p : net.params().items()) ckpt.params.push_back({p->name(), p->value()});
    return ckpt;
}

void apply_params(const Checkpoint& ckpt, model::DualBranchNet<float>& net, const std::string& prefix) {
    for (const auto& p : ckpt.params) {
        if (!p.name.starts_with(prefix)) continue;
        if (!net.params().contains(p.name))
            throw DataError("checkpoint parameter '" + p.name + "' does not exist in the network");
        auto& dst = net.params().get(p.name);
        if (dst.value().shape() != p.value.shape())
            throw DataError("checkpoint parameter '" + p.name + "' has shape " + nn::shape_str(p.value.shape()) +
                            ", network expects " + nn::shape_str(dst.value().shape()));
        dst.mutable_value() = p.value;
    }
    for (const auto& p : net.params().items()) {
        if (!p->name().starts_with(prefix)) continue;
        const bool present = std::any_of(ckpt.params.begin(), ckpt.params.end(),
                                         [&](const NamedTensor& t) { return t.name == p->name(); });
        if (!present) throw DataError("checkpoint lacks parameter '" + p->name() + "'");
    }
}

model::DualBranchNet<float> build_network(const Checkpoint& ckpt) {
    model::DualBranchNet<float> net(ckpt.arch, ckpt.aggregation, ckpt.seed);
    apply_params(ckpt, net);
    return net;
}

std::string format_trace(const std::vector<TraceRecord>& trace) {
    std::ostringstream os;
    os.precision(17);
    os << "step\tloss\trmse_shadow\trmse_nonshadow\n";
    for (const auto& r : trace) os << r.step << '\t' << r.loss << '\t' << r.rmse_shadow << '\t' << r.rmse_nonshadow << '\n';
    return os.str();
}

std::vector<TraceRecord> parse_trace(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<TraceRecord> out;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line.starts_with("step")) continue;
        std::istringstream ls(line);
        TraceRecord r;
        if (!(ls >> r.step >> r.loss >> r.rmse_shadow >> r.rmse_nonshadow))
            throw DataError("trace line " + std::to_string(lineno) + " is malformed");
        out.push_back(r);
    }
    return out;
}

}  // namespace deshadow::train
