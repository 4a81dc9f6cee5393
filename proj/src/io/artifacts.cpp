#include "tta/io/artifacts.hpp"

#include <string>

#include "tta/core/error.hpp"
#include "tta/io/binary.hpp"

namespace tta::io {

namespace {

constexpr std::string_view kCheckpointMagic = "TTA1";
constexpr std::string_view kPenaltyMagic = "TTAP";
constexpr std::string_view kPrototypeMagic = "TTAQ";
constexpr std::string_view kProjectorMagic = "TTAJ";
constexpr std::string_view kDatasetMagic = "TTAD";

void header(ByteWriter& w, std::string_view magic) {
    w.raw({reinterpret_cast<const std::uint8_t*>(magic.data()), magic.size()});
    w.u16(kFormatVersion);
}

ByteReader open(std::span<const std::uint8_t> bytes, std::string_view magic, const std::string& what) {
    ByteReader r = ByteReader::sealed(bytes, what);
    r.expect_magic(magic);
    const std::uint16_t version = r.u16();
    if (version != kFormatVersion) {
        throw Error(what + ": unsupported format version " + std::to_string(version));
    }
    return r;
}

std::uint32_t narrow32(std::size_t v, const char* what) {
    if (v > 0xffffffffu) throw Error(std::string(what) + ": value does not fit in 32 bits");
    return static_cast<std::uint32_t>(v);
}

// Unit descriptors, then parameter payload, then running statistics.
void write_units(ByteWriter& w, const std::vector<LayerUnit>& units) {
    w.u32(narrow32(units.size(), "unit count"));
    for (const LayerUnit& u : units) {
        w.str(u.name);
        w.u8(static_cast<std::uint8_t>(u.kind));
        w.u8(static_cast<std::uint8_t>(u.activation));
        w.u32(narrow32(u.params.size(), "parameter count"));
        for (const Tensor& p : u.params) {
            w.u32(narrow32(p.rank(), "rank"));
            for (std::size_t d : p.shape) w.u64(d);
        }
        w.u64(u.kind == UnitKind::batchnorm ? u.running_mean.size() : 0);
    }
    for (const LayerUnit& u : units)
        for (const Tensor& p : u.params)
            for (double v : p.data) w.f64(v);
    for (const LayerUnit& u : units) {
        if (u.kind != UnitKind::batchnorm) continue;
        for (double v : u.running_mean) w.f64(v);
        for (double v : u.running_var) w.f64(v);
    }
}

void check_unit(const LayerUnit& u, std::size_t bn_features, const std::string& what) {
    const auto fail = [&](const std::string& msg) { throw Error(what + ": unit '" + u.name + "': " + msg); };
    const auto rank_is = [&](std::size_t i, std::size_t r) { return u.params[i].rank() == r; };
    switch (u.kind) {
        case UnitKind::linear:
            if (u.params.size() != 2 || !rank_is(0, 2) || !rank_is(1, 1) || u.params[1].dim(0) != u.params[0].dim(0))
                fail("malformed linear parameters");
            break;
        case UnitKind::conv2d:
            if (u.params.size() != 2 || !rank_is(0, 4) || !rank_is(1, 1) || u.params[1].dim(0) != u.params[0].dim(0) ||
                u.params[0].dim(2) != 3 || u.params[0].dim(3) != 3)
                fail("malformed conv2d parameters");
            break;
        case UnitKind::batchnorm:
            if (u.params.size() != 2 || !rank_is(0, 1) || !rank_is(1, 1) || u.params[0].dim(0) != bn_features ||
                u.params[1].dim(0) != bn_features)
                fail("malformed batchnorm parameters");
            break;
        case UnitKind::activation:
            if (!u.params.empty()) fail("activation units carry no parameters");
            if (static_cast<std::uint8_t>(u.activation) > static_cast<std::uint8_t>(ActivationKind::flatten))
                fail("unknown activation");
            break;
        default:
            fail("unknown unit kind");
    }
    if (u.kind != UnitKind::batchnorm && bn_features != 0) fail("running statistics on a non-batchnorm unit");
}

std::vector<LayerUnit> read_units(ByteReader& r, const std::string& what) {
    const std::uint32_t count = r.u32();
    std::vector<LayerUnit> units;
    std::vector<std::uint64_t> features;
    for (std::uint32_t i = 0; i < count; ++i) {
        LayerUnit u;
        u.name = r.str();
        u.kind = static_cast<UnitKind>(r.u8());
        u.activation = static_cast<ActivationKind>(r.u8());
        const std::uint32_t n_params = r.u32();
        if (n_params > 2) throw Error(what + ": unit '" + u.name + "': too many parameters");
        for (std::uint32_t p = 0; p < n_params; ++p) {
            const std::uint32_t rank = r.u32();
            if (rank == 0 || rank > 4) throw Error(what + ": unit '" + u.name + "': bad parameter rank");
            Shape shape(rank);
            std::uint64_t total = 1;
            for (auto& d : shape) {
                const std::uint64_t v = r.u64();
                if (v == 0 || v > (1u << 24) || total * v > (1ull << 28))
                    throw Error(what + ": unit '" + u.name + "': implausible parameter shape");
                total *= v;
                d = static_cast<std::size_t>(v);
            }
            u.params.emplace_back(std::move(shape));
        }
        const std::uint64_t f = r.u64();
        if (f > (1u << 24)) throw Error(what + ": unit '" + u.name + "': implausible feature count");
        check_unit(u, static_cast<std::size_t>(f), what);
        features.push_back(f);
        units.push_back(std::move(u));
    }
    for (LayerUnit& u : units)
        for (Tensor& p : u.params)
            for (double& v : p.data) v = r.f64();
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (units[i].kind != UnitKind::batchnorm) continue;
        units[i].running_mean.resize(features[i]);
        units[i].running_var.resize(features[i]);
        for (double& v : units[i].running_mean) v = r.f64();
        for (double& v : units[i].running_var) v = r.f64();
    }
    return units;
}

void write_tensor_values(ByteWriter& w, const Tensor& t) {
    for (double v : t.data) w.f64(v);
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Model& model) {
    ByteWriter w;
    header(w, kCheckpointMagic);
    w.u32(narrow32(model.input().channels, "channels"));
    w.u32(narrow32(model.input().height, "height"));
    w.u32(narrow32(model.input().width, "width"));
    w.u32(narrow32(model.num_classes(), "classes"));
    w.u32(narrow32(model.encoder_end(), "encoder_end"));
    w.u8(static_cast<std::uint8_t>(model.bn_mode()));
    write_units(w, model.units());
    w.seal();
    return w.take();
}

Model decode_checkpoint(std::span<const std::uint8_t> bytes) {
    const std::string what = "checkpoint";
    ByteReader r = open(bytes, kCheckpointMagic, what);
    InputSignature input;
    input.channels = r.u32();
    input.height = r.u32();
    input.width = r.u32();
    const std::size_t classes = r.u32();
    const std::size_t encoder_end = r.u32();
    const std::uint8_t bn = r.u8();
    if (bn > 1) throw Error(what + ": unknown batchnorm mode");
    std::vector<LayerUnit> units = read_units(r, what);
    r.finish();
    return Model(std::move(units), encoder_end, input, classes, static_cast<BnMode>(bn));
}

Digest checkpoint_digest(const Model& model) {
    const auto bytes = encode_checkpoint(model);
    Digest d{};
    std::copy(bytes.end() - static_cast<std::ptrdiff_t>(d.size()), bytes.end(), d.begin());
    return d;
}

std::vector<std::uint8_t> encode_penalty(const swr::PenaltyVector& penalty) {
    if (penalty.similarities.size() != penalty.size() || penalty.unit_names.size() != penalty.size()) {
        throw Error("penalty vector: inconsistent lengths");
    }
    ByteWriter w;
    header(w, kPenaltyMagic);
    w.digest(penalty.source_hash);
    const swr::SwrVariant& v = penalty.variant;
    w.u8(static_cast<std::uint8_t>(v.exponent));
    w.u8(static_cast<std::uint8_t>(v.flip));
    w.u8(static_cast<std::uint8_t>(v.manual_curve));
    w.f64(v.constant_value);
    w.u8(static_cast<std::uint8_t>(v.theta_star_policy));
    w.u64(penalty.n_samples);
    w.u32(narrow32(penalty.size(), "unit count"));
    for (std::size_t i = 0; i < penalty.size(); ++i) {
        w.str(penalty.unit_names[i]);
        w.f64(penalty.similarities[i]);
        w.f64(penalty.penalties[i]);
    }
    w.seal();
    return w.take();
}

swr::PenaltyVector decode_penalty(std::span<const std::uint8_t> bytes) {
    const std::string what = "penalty vector";
    ByteReader r = open(bytes, kPenaltyMagic, what);
    swr::PenaltyVector p;
    p.source_hash = r.digest();
    p.variant.exponent = r.u8();
    const std::uint8_t flip = r.u8();
    const std::uint8_t curve = r.u8();
    p.variant.constant_value = r.f64();
    const std::uint8_t policy = r.u8();
    if (flip > 2 || curve > 3 || policy > 1) throw Error(what + ": unknown variant enumerator");
    p.variant.flip = static_cast<swr::Flip>(flip);
    p.variant.manual_curve = static_cast<swr::ManualCurve>(curve);
    p.variant.theta_star_policy = static_cast<swr::ThetaStarPolicy>(policy);
    p.variant.validate();
    p.n_samples = static_cast<std::size_t>(r.u64());
    const std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        p.unit_names.push_back(r.str());
        p.similarities.push_back(r.f64());
        p.penalties.push_back(r.f64());
    }
    r.finish();
    return p;
}

std::vector<std::uint8_t> encode_prototypes(const nsp::PrototypeBank& bank) {
    ByteWriter w;
    header(w, kPrototypeMagic);
    w.digest(bank.source_hash);
    w.f64(bank.alpha);
    w.f64(bank.tau);
    w.u8(static_cast<std::uint8_t>(bank.source));
    w.u32(narrow32(bank.num_classes(), "classes"));
    w.u32(narrow32(bank.dim(), "dim"));
    write_tensor_values(w, bank.prototypes);
    w.seal();
    return w.take();
}

nsp::PrototypeBank decode_prototypes(std::span<const std::uint8_t> bytes) {
    const std::string what = "prototype bank";
    ByteReader r = open(bytes, kPrototypeMagic, what);
    nsp::PrototypeBank b;
    b.source_hash = r.digest();
    b.alpha = r.f64();
    b.tau = r.f64();
    const std::uint8_t src = r.u8();
    if (src > 2) throw Error(what + ": unknown prototype source");
    b.source = static_cast<nsp::PrototypeSource>(src);
    const std::size_t c = r.u32();
    const std::size_t d = r.u32();
    if (c == 0 || d == 0 || c * d > (1u << 26)) throw Error(what + ": implausible dimensions");
    b.prototypes = Tensor({c, d});
    for (double& v : b.prototypes.data) v = r.f64();
    r.finish();
    return b;
}

std::vector<std::uint8_t> encode_projector(const nsp::Projector& projector) {
    ByteWriter w;
    header(w, kProjectorMagic);
    w.digest(projector.source_hash());
    w.u32(narrow32(projector.input_dim(), "input dim"));
    w.u32(narrow32(projector.spec().depth, "depth"));
    w.u32(narrow32(projector.spec().width, "width"));
    write_units(w, projector.net().units());
    w.seal();
    return w.take();
}

nsp::Projector decode_projector(std::span<const std::uint8_t> bytes) {
    const std::string what = "projector";
    ByteReader r = open(bytes, kProjectorMagic, what);
    const Digest hash = r.digest();
    const std::size_t input_dim = r.u32();
    nsp::ProjectorSpec spec;
    spec.depth = r.u32();
    spec.width = r.u32();
    std::vector<LayerUnit> units = read_units(r, what);
    r.finish();
    nsp::Projector p(input_dim, spec, Sequential(std::move(units)));
    p.set_source_hash(hash);
    return p;
}

std::vector<std::uint8_t> encode_dataset(const data::Dataset& dataset) {
    ByteWriter w;
    header(w, kDatasetMagic);
    w.u32(narrow32(dataset.num_classes, "classes"));
    w.u32(narrow32(dataset.height, "height"));
    w.u32(narrow32(dataset.width, "width"));
    w.u64(dataset.size());
    if (dataset.labels.size() != dataset.size()) throw Error("dataset: label count differs from image count");
    for (int label : dataset.labels) w.i32(label);
    for (const data::Image& img : dataset.images) {
        if (img.height != dataset.height || img.width != dataset.width || img.values.size() != data::kChannels * img.plane())
            throw Error("dataset: image size differs from dataset size");
        for (double v : img.values) w.f64(v);
    }
    w.seal();
    return w.take();
}

data::Dataset decode_dataset(std::span<const std::uint8_t> bytes) {
    const std::string what = "dataset";
    ByteReader r = open(bytes, kDatasetMagic, what);
    data::Dataset ds;
    ds.num_classes = r.u32();
    ds.height = r.u32();
    ds.width = r.u32();
    const std::uint64_t n = r.u64();
    const std::uint64_t per = data::kChannels * static_cast<std::uint64_t>(ds.height) * ds.width;
    if (per == 0 || n > (1ull << 24) || n * (per * 8 + 4) > bytes.size()) throw Error(what + ": implausible dimensions");
    ds.labels.resize(n);
    for (int& label : ds.labels) {
        label = r.i32();
        if (label < 0 || static_cast<std::size_t>(label) >= ds.num_classes) throw Error(what + ": label out of range");
    }
    ds.images.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        data::Image img(ds.height, ds.width);
        for (double& v : img.values) v = r.f64();
        ds.images.push_back(std::move(img));
    }
    r.finish();
    return ds;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) { write_file(path, encode_checkpoint(model)); }

Model load_checkpoint(const std::filesystem::path& path, Digest* digest) {
    const auto bytes = read_file(path);
    Model m = decode_checkpoint(bytes);
    if (digest != nullptr) std::copy(bytes.end() - static_cast<std::ptrdiff_t>(digest->size()), bytes.end(), digest->begin());
    return m;
}

void save_penalty(const std::filesystem::path& path, const swr::PenaltyVector& p) { write_file(path, encode_penalty(p)); }
swr::PenaltyVector load_penalty(const std::filesystem::path& path) { return decode_penalty(read_file(path)); }
void save_prototypes(const std::filesystem::path& path, const nsp::PrototypeBank& b) { write_file(path, encode_prototypes(b)); }
nsp::PrototypeBank load_prototypes(const std::filesystem::path& path) { return decode_prototypes(read_file(path)); }
void save_projector(const std::filesystem::path& path, const nsp::Projector& p) { write_file(path, encode_projector(p)); }
nsp::Projector load_projector(const std::filesystem::path& path) { return decode_projector(read_file(path)); }
void save_dataset(const std::filesystem::path& path, const data::Dataset& d) { write_file(path, encode_dataset(d)); }
data::Dataset load_dataset(const std::filesystem::path& path) { return decode_dataset(read_file(path)); }

}  // namespace tta::io
