#include "advmask/embedding.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "advmask/errors.hpp"
#include "advmask/face.hpp"
#include "advmask/rng.hpp"

namespace advmask {

double vector_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> unit_normalized(const std::vector<double>& v) {
    const double n = vector_norm(v);
    if (n == 0.0) throw ZeroVector("cannot normalize a zero vector");
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ShapeMismatch("cosine: vector lengths differ");
    if (a.empty()) throw ShapeMismatch("cosine: empty vectors");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine of a zero vector is undefined");
    const double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return c < -1.0 ? -1.0 : (c > 1.0 ? 1.0 : c);
}

std::vector<double> cosine_grad_a(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ShapeMismatch("cosine_grad_a: vector lengths differ");
    double dot = 0.0, na2 = 0.0, nb2 = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na2 += a[i] * a[i];
        nb2 += b[i] * b[i];
    }
    if (na2 == 0.0 || nb2 == 0.0) throw ZeroVector("cosine gradient of a zero vector");
    const double na = std::sqrt(na2), nb = std::sqrt(nb2);
    const double inv = 1.0 / (na * nb);
    const double cos_ab = dot * inv;
    std::vector<double> grad(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        grad[i] = b[i] * inv - cos_ab * a[i] / na2;
    }
    return grad;
}

namespace {

struct LayerPlan {
    int in_ch, out_ch, kernel, stride;
};

// Adaptive pooling grid applied after the conv stack.
constexpr int kPoolGrid = 4;

// Conv stack per depth; all variants pool into kPoolGrid^2 regions afterwards.
std::vector<LayerPlan> layer_plan(int depth) {
    if (depth < 1 || depth > 4) throw InvalidConfig("toy embedder depth must be in [1,4]");
    std::vector<LayerPlan> plan;
    plan.push_back({3, 8, 5, 4});                          // 112 -> 27
    if (depth >= 2) plan.push_back({8, 16, 3, 2});         // 27 -> 13
    if (depth >= 3) plan.push_back({16, 16, 3, 2});        // 13 -> 6
    if (depth >= 4) plan.push_back({16, 16, 3, 1});        // 6 -> 4
    return plan;
}

int conv_out_size(int in, int kernel, int stride) { return (in - kernel) / stride + 1; }

}  // namespace

FrozenConvNet::FrozenConvNet(ModelInfo info, std::uint64_t seed)
    : EmbeddingModel(std::move(info)) {
    if (info_.dim <= 0) throw InvalidConfig("embedding dim must be positive");
    Rng rng(seed);
    int spatial = kFaceSize;
    for (const LayerPlan& p : layer_plan(info_.depth)) {
        ConvLayer layer{p.in_ch, p.out_ch, p.kernel, p.stride, {}, {}};
        const int fan_in = p.in_ch * p.kernel * p.kernel;
        const double scale = std::sqrt(2.0 / fan_in);
        layer.weights.resize(static_cast<size_t>(p.out_ch) * fan_in);
        for (double& w : layer.weights) w = scale * rng.gaussian();
        layer.bias.resize(p.out_ch);
        for (double& b : layer.bias) b = 0.05 * rng.gaussian();
        spatial = conv_out_size(spatial, p.kernel, p.stride);
        if (spatial < kPoolGrid) throw InvalidConfig("toy embedder spatial map collapsed");
        layers_.push_back(std::move(layer));
    }
    pooled_dim_ = kPoolGrid * kPoolGrid * layers_.back().out_ch;
    projection_.resize(static_cast<size_t>(info_.dim) * pooled_dim_);
    const double proj_scale = std::sqrt(1.0 / pooled_dim_);
    for (double& w : projection_) w = proj_scale * rng.gaussian();
    compute_reference_offset();
}

FrozenConvNet::FrozenConvNet(ModelInfo info, std::vector<ConvLayer> layers,
                             std::vector<double> projection, int pooled_dim)
    : EmbeddingModel(std::move(info)),
      layers_(std::move(layers)),
      projection_(std::move(projection)),
      pooled_dim_(pooled_dim) {
    compute_reference_offset();
}

void FrozenConvNet::compute_reference_offset() {
    const Image gray(kFaceSize, kFaceSize, 3, 0.5);
    reference_offset_ = raw_embed(gray);
}

std::vector<Image> FrozenConvNet::forward_maps(const Image& image) const {
    if (image.height != kFaceSize || image.width != kFaceSize || image.channels != 3) {
        throw ShapeMismatch("embed: image must be 112x112x3");
    }
    std::vector<Image> maps;
    maps.reserve(layers_.size() + 1);
    maps.push_back(image);
    for (const ConvLayer& layer : layers_) {
        const Image& in = maps.back();
        const int oh = conv_out_size(in.height, layer.kernel, layer.stride);
        const int ow = conv_out_size(in.width, layer.kernel, layer.stride);
        Image out(oh, ow, layer.out_ch);
        const int k = layer.kernel;
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                const int iy0 = oy * layer.stride;
                const int ix0 = ox * layer.stride;
                for (int oc = 0; oc < layer.out_ch; ++oc) {
                    double acc = layer.bias[oc];
                    const double* w =
                        layer.weights.data() + static_cast<size_t>(oc) * layer.in_ch * k * k;
                    for (int ic = 0; ic < layer.in_ch; ++ic) {
                        for (int ky = 0; ky < k; ++ky) {
                            const double* row =
                                &in.data[(static_cast<size_t>(iy0 + ky) * in.width + ix0) *
                                         in.channels + ic];
                            const double* wrow = w + (static_cast<size_t>(ic) * k + ky) * k;
                            for (int kx = 0; kx < k; ++kx) {
                                acc += wrow[kx] * row[static_cast<size_t>(kx) * in.channels];
                            }
                        }
                    }
                    out.at(oy, ox, oc) = std::tanh(acc);
                }
            }
        }
        maps.push_back(std::move(out));
    }
    return maps;
}

std::vector<double> FrozenConvNet::embed(const Image& image) const {
    std::vector<double> out = raw_embed(image);
    for (int d = 0; d < info_.dim; ++d) out[d] -= reference_offset_[d];
    return out;
}

std::vector<double> FrozenConvNet::raw_embed(const Image& image) const {
    const std::vector<Image> maps = forward_maps(image);
    const Image& top = maps.back();

    // Adaptive average pooling onto the kPoolGrid x kPoolGrid grid.
    std::vector<double> pooled(pooled_dim_, 0.0);
    for (int ry = 0; ry < kPoolGrid; ++ry) {
        for (int rx = 0; rx < kPoolGrid; ++rx) {
            const int y0 = ry * top.height / kPoolGrid, y1 = (ry + 1) * top.height / kPoolGrid;
            const int x0 = rx * top.width / kPoolGrid, x1 = (rx + 1) * top.width / kPoolGrid;
            const double inv = 1.0 / ((y1 - y0) * (x1 - x0));
            for (int c = 0; c < top.channels; ++c) {
                double acc = 0.0;
                for (int y = y0; y < y1; ++y) {
                    for (int x = x0; x < x1; ++x) acc += top.at(y, x, c);
                }
                pooled[(static_cast<size_t>(ry) * kPoolGrid + rx) * top.channels + c] = acc * inv;
            }
        }
    }

    std::vector<double> out(info_.dim, 0.0);
    for (int d = 0; d < info_.dim; ++d) {
        const double* w = projection_.data() + static_cast<size_t>(d) * pooled_dim_;
        double acc = 0.0;
        for (int p = 0; p < pooled_dim_; ++p) acc += w[p] * pooled[p];
        out[d] = acc;
    }
    return out;
}

Image FrozenConvNet::embed_backward(const Image& image,
                                    const std::vector<double>& grad_embedding) const {
    if (static_cast<int>(grad_embedding.size()) != info_.dim) {
        throw ShapeMismatch("embed_backward: gradient length != dim");
    }
    const std::vector<Image> maps = forward_maps(image);
    const Image& top = maps.back();

    // Projection backward into pooled space.
    std::vector<double> grad_pooled(pooled_dim_, 0.0);
    for (int d = 0; d < info_.dim; ++d) {
        const double g = grad_embedding[d];
        if (g == 0.0) continue;
        const double* w = projection_.data() + static_cast<size_t>(d) * pooled_dim_;
        for (int p = 0; p < pooled_dim_; ++p) grad_pooled[p] += g * w[p];
    }

    // Un-pool into the top feature map.
    Image grad = Image::zeros_like(top);
    for (int ry = 0; ry < kPoolGrid; ++ry) {
        for (int rx = 0; rx < kPoolGrid; ++rx) {
            const int y0 = ry * top.height / kPoolGrid, y1 = (ry + 1) * top.height / kPoolGrid;
            const int x0 = rx * top.width / kPoolGrid, x1 = (rx + 1) * top.width / kPoolGrid;
            const double inv = 1.0 / ((y1 - y0) * (x1 - x0));
            for (int c = 0; c < top.channels; ++c) {
                const double g =
                    grad_pooled[(static_cast<size_t>(ry) * kPoolGrid + rx) * top.channels + c] *
                    inv;
                for (int y = y0; y < y1; ++y) {
                    for (int x = x0; x < x1; ++x) grad.at(y, x, c) += g;
                }
            }
        }
    }

    // Walk the conv stack backwards (tanh', then conv data gradient).
    for (int li = static_cast<int>(layers_.size()) - 1; li >= 0; --li) {
        const ConvLayer& layer = layers_[li];
        const Image& activated = maps[li + 1];
        const Image& input = maps[li];
        for (size_t i = 0; i < grad.data.size(); ++i) {
            const double a = activated.data[i];
            grad.data[i] *= 1.0 - a * a;
        }
        Image grad_in = Image::zeros_like(input);
        const int k = layer.kernel;
        for (int oy = 0; oy < activated.height; ++oy) {
            for (int ox = 0; ox < activated.width; ++ox) {
                const int iy0 = oy * layer.stride;
                const int ix0 = ox * layer.stride;
                for (int oc = 0; oc < layer.out_ch; ++oc) {
                    const double g = grad.at(oy, ox, oc);
                    if (g == 0.0) continue;
                    const double* w =
                        layer.weights.data() + static_cast<size_t>(oc) * layer.in_ch * k * k;
                    for (int ic = 0; ic < layer.in_ch; ++ic) {
                        for (int ky = 0; ky < k; ++ky) {
                            double* row =
                                &grad_in.data[(static_cast<size_t>(iy0 + ky) * grad_in.width + ix0) *
                                              grad_in.channels + ic];
                            const double* wrow = w + (static_cast<size_t>(ic) * k + ky) * k;
                            for (int kx = 0; kx < k; ++kx) {
                                row[static_cast<size_t>(kx) * grad_in.channels] += g * wrow[kx];
                            }
                        }
                    }
                }
            }
        }
        grad = std::move(grad_in);
    }
    return grad;
}

namespace {

constexpr char kWeightsMagic[8] = {'A', 'M', 'F', 'C', 'N', 'E', 'T', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void FrozenConvNet::serialize(std::ostream& out) const {
    out.write(kWeightsMagic, sizeof(kWeightsMagic));
    write_pod<std::int32_t>(out, info_.dim);
    write_pod<std::int32_t>(out, info_.depth);
    const std::uint32_t loss_len = static_cast<std::uint32_t>(info_.loss_family.size());
    write_pod(out, loss_len);
    out.write(info_.loss_family.data(), loss_len);
    write_pod<std::int32_t>(out, static_cast<std::int32_t>(layers_.size()));
    for (const ConvLayer& layer : layers_) {
        write_pod<std::int32_t>(out, layer.in_ch);
        write_pod<std::int32_t>(out, layer.out_ch);
        write_pod<std::int32_t>(out, layer.kernel);
        write_pod<std::int32_t>(out, layer.stride);
        for (double w : layer.weights) write_pod(out, w);
        for (double b : layer.bias) write_pod(out, b);
    }
    write_pod<std::int32_t>(out, pooled_dim_);
    for (double w : projection_) write_pod(out, w);
}

std::shared_ptr<FrozenConvNet> FrozenConvNet::deserialize(std::istream& in,
                                                          const std::string& name,
                                                          const std::string& kind) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kWeightsMagic, sizeof(magic)) != 0) {
        throw AssetMissing("embedding weight file has bad magic");
    }
    ModelInfo info;
    info.name = name;
    info.kind = kind;
    info.dim = read_pod<std::int32_t>(in);
    info.depth = read_pod<std::int32_t>(in);
    const auto loss_len = read_pod<std::uint32_t>(in);
    info.loss_family.resize(loss_len);
    in.read(info.loss_family.data(), loss_len);
    const auto n_layers = read_pod<std::int32_t>(in);
    std::vector<ConvLayer> layers;
    for (int i = 0; i < n_layers; ++i) {
        ConvLayer layer{};
        layer.in_ch = read_pod<std::int32_t>(in);
        layer.out_ch = read_pod<std::int32_t>(in);
        layer.kernel = read_pod<std::int32_t>(in);
        layer.stride = read_pod<std::int32_t>(in);
        layer.weights.resize(static_cast<size_t>(layer.out_ch) * layer.in_ch * layer.kernel *
                             layer.kernel);
        for (double& w : layer.weights) w = read_pod<double>(in);
        layer.bias.resize(layer.out_ch);
        for (double& b : layer.bias) b = read_pod<double>(in);
        layers.push_back(std::move(layer));
    }
    const auto pooled_dim = read_pod<std::int32_t>(in);
    std::vector<double> projection(static_cast<size_t>(info.dim) * pooled_dim);
    for (double& w : projection) w = read_pod<double>(in);
    if (!in) throw AssetMissing("embedding weight file truncated");
    return std::shared_ptr<FrozenConvNet>(
        new FrozenConvNet(std::move(info), std::move(layers), std::move(projection), pooled_dim));
}

}  // namespace advmask
