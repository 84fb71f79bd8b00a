#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "advmask/image.hpp"

namespace advmask {

struct ModelInfo {
    std::string name;
    int dim = 0;
    int depth = 0;             // backbone depth (conv blocks for toys)
    std::string loss_family;   // training-loss family label
    std::string kind;          // "toy" | "asset"
};

/// Embedding-model abstraction: a deterministic, differentiable map from a
/// 112x112x3 image to R^dim. Immutable after construction.
class EmbeddingModel {
public:
    virtual ~EmbeddingModel() = default;

    const ModelInfo& info() const { return info_; }
    const std::string& name() const { return info_.name; }
    int dim() const { return info_.dim; }

    /// Throws ShapeMismatch unless the image is 112x112x3.
    virtual std::vector<double> embed(const Image& image) const = 0;

    /// Gradient of <grad_embedding, embed(image)> w.r.t. image pixels.
    virtual Image embed_backward(const Image& image,
                                 const std::vector<double>& grad_embedding) const = 0;

protected:
    explicit EmbeddingModel(ModelInfo info) : info_(std::move(info)) {}
    ModelInfo info_;
};

using ModelList = std::vector<std::shared_ptr<const EmbeddingModel>>;

/// cos(a, b); throws ZeroVector on a zero argument, ShapeMismatch on length
/// disagreement. Symmetric and invariant under positive scaling.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

/// d cos(a, b) / d a.
std::vector<double> cosine_grad_a(const std::vector<double>& a, const std::vector<double>& b);

std::vector<double> unit_normalized(const std::vector<double>& v);
double vector_norm(const std::vector<double>& v);

/// Fixed-seed frozen convolutional embedder: a stack of strided conv+tanh
/// blocks, 2x2 adaptive average pooling, and a frozen linear projection.
/// Toys are built from (seed, depth); assets deserialize the same structure
/// from a weight file.
class FrozenConvNet : public EmbeddingModel {
public:
    /// Builds a toy with `depth` conv blocks (1..4) and random frozen
    /// weights drawn from the seed.
    FrozenConvNet(ModelInfo info, std::uint64_t seed);

    std::vector<double> embed(const Image& image) const override;
    Image embed_backward(const Image& image,
                         const std::vector<double>& grad_embedding) const override;

    /// Binary weight (de)serialization; the asset adapter's wire format.
    void serialize(std::ostream& out) const;
    static std::shared_ptr<FrozenConvNet> deserialize(std::istream& in, const std::string& name,
                                                      const std::string& kind);

private:
    struct ConvLayer {
        int in_ch, out_ch, kernel, stride;
        std::vector<double> weights;  // [out_ch][in_ch][k][k]
        std::vector<double> bias;     // [out_ch]
    };

    FrozenConvNet(ModelInfo info, std::vector<ConvLayer> layers,
                  std::vector<double> projection, int pooled_dim);

    std::vector<Image> forward_maps(const Image& image) const;
    std::vector<double> raw_embed(const Image& image) const;
    void compute_reference_offset();

    std::vector<ConvLayer> layers_;
    std::vector<double> projection_;  // [dim][pooled_dim]
    int pooled_dim_ = 0;
    // Raw embedding of a mid-gray image; subtracting it centers the output
    // space so cosine reflects image differences instead of the shared DC
    // response of the random filters. Constant w.r.t. the input.
    std::vector<double> reference_offset_;
};

}  // namespace advmask
