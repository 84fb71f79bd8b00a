#include "advmask/face.hpp"

#include <cmath>

#include "advmask/errors.hpp"
#include "advmask/rng.hpp"

namespace advmask {

void FaceSample::validate() const {
    if (image.height != kFaceSize || image.width != kFaceSize || image.channels != 3) {
        throw ShapeMismatch("face image must be 112x112x3");
    }
    for (double v : image.data) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidConfig("face pixel outside [0,1]");
    }
    for (const Point2& p : landmarks) {
        if (p.x < 0.0 || p.x > kFaceSize - 1 || p.y < 0.0 || p.y > kFaceSize - 1) {
            throw InvalidConfig("landmark outside image bounds");
        }
    }
}

const std::array<Point2, 5>& canonical_landmarks() {
    static const std::array<Point2, 5> pts = {{
        {38.2946, 51.6963},  // left eye
        {73.5318, 51.5014},  // right eye
        {56.0252, 71.7366},  // nose tip
        {41.5493, 92.3655},  // left mouth corner
        {70.7299, 92.2041},  // right mouth corner
    }};
    return pts;
}

namespace {

double smoothstep(double edge0, double edge1, double x) {
    const double t = clamp01((x - edge0) / (edge1 - edge0));
    return t * t * (3.0 - 2.0 * t);
}

// Soft-edged filled ellipse coverage at (x, y): 1 inside, 0 outside.
double ellipse_mask(double x, double y, double cx, double cy, double rx, double ry,
                    double softness = 1.5) {
    const double dx = (x - cx) / rx;
    const double dy = (y - cy) / ry;
    const double d = std::sqrt(dx * dx + dy * dy);
    return 1.0 - smoothstep(1.0 - softness / rx, 1.0 + softness / rx, d);
}

struct Rgb {
    double r, g, b;
};

void blend(Image& img, int y, int x, const Rgb& color, double alpha) {
    if (alpha <= 0.0) return;
    img.at(y, x, 0) = img.at(y, x, 0) * (1.0 - alpha) + color.r * alpha;
    img.at(y, x, 1) = img.at(y, x, 1) * (1.0 - alpha) + color.g * alpha;
    img.at(y, x, 2) = img.at(y, x, 2) * (1.0 - alpha) + color.b * alpha;
}

}  // namespace

FaceSample synth_face(const std::string& identity, int variant) {
    Rng id_rng(fnv1a64(identity));
    Rng var_rng = id_rng.substream("variant", static_cast<std::uint64_t>(variant));

    // Identity appearance parameters.
    const double skin_base = id_rng.uniform(0.45, 0.85);
    const Rgb skin{skin_base, skin_base * id_rng.uniform(0.72, 0.85),
                   skin_base * id_rng.uniform(0.55, 0.75)};
    const Rgb hair{id_rng.uniform(0.05, 0.55), id_rng.uniform(0.05, 0.40),
                   id_rng.uniform(0.02, 0.30)};
    const Rgb iris{id_rng.uniform(0.1, 0.6), id_rng.uniform(0.15, 0.55),
                   id_rng.uniform(0.1, 0.7)};
    const Rgb bg{id_rng.uniform(0.1, 0.9), id_rng.uniform(0.1, 0.9),
                 id_rng.uniform(0.1, 0.9)};
    const double brow_h = id_rng.uniform(1.2, 3.2);
    const double mouth_fullness = id_rng.uniform(0.5, 1.0);
    const double hair_rx = id_rng.uniform(34.0, 44.0);
    const double hair_drop = id_rng.uniform(24.0, 36.0);
    // Oriented sinusoid texture with identity frequencies and phases; the
    // dominant identity cue. Full strength on the upper face so it survives
    // lower-face occlusion, half strength below the nose.
    const double f1 = id_rng.uniform(0.12, 0.55), p1 = id_rng.uniform(0.0, 6.28);
    const double f2 = id_rng.uniform(0.12, 0.55), p2 = id_rng.uniform(0.0, 6.28);
    const double f3 = id_rng.uniform(0.05, 0.20), p3 = id_rng.uniform(0.0, 6.28);
    const double o1 = id_rng.uniform(-1.2, 1.2), o2 = id_rng.uniform(-1.2, 1.2);
    const double tex_amp = id_rng.uniform(0.10, 0.20);
    const double bg_freq = id_rng.uniform(0.1, 0.6), bg_phase = id_rng.uniform(0.0, 6.28);

    // Per-variant photometric jitter.
    const double gain = 1.0 + var_rng.uniform(-0.04, 0.04);
    const double bias = var_rng.uniform(-0.02, 0.02);
    const double noise_sigma = 0.008;

    const auto& lm = canonical_landmarks();
    const Point2 le = lm[0], re = lm[1], nose = lm[2], ml = lm[3], mr = lm[4];
    const double eye_y = 0.5 * (le.y + re.y);
    const double mouth_cx = 0.5 * (ml.x + mr.x);
    const double mouth_cy = 0.5 * (ml.y + mr.y);

    Image img(kFaceSize, kFaceSize, 3);
    for (int y = 0; y < kFaceSize; ++y) {
        for (int x = 0; x < kFaceSize; ++x) {
            // Background: identity-striped gradient.
            const double t = static_cast<double>(y) / (kFaceSize - 1);
            const double stripes = 0.1 * std::sin(bg_freq * x + bg_phase);
            img.at(y, x, 0) = clamp01(bg.r * (0.8 + 0.2 * t) + stripes);
            img.at(y, x, 1) = clamp01(bg.g * (0.8 + 0.2 * t) + stripes);
            img.at(y, x, 2) = clamp01(bg.b * (0.8 + 0.2 * t) + stripes);

            // Head.
            const double head = ellipse_mask(x, y, 56.0, 62.0, 40.0, 52.0);
            blend(img, y, x, skin, head);

            // Hair cap above the forehead.
            const double hair_cap = ellipse_mask(x, y, 56.0, 26.0, hair_rx, hair_drop) *
                                    smoothstep(36.0, 24.0, static_cast<double>(y));
            blend(img, y, x, hair, hair_cap * head);

            // Identity texture over the whole head, attenuated below the nose.
            if (head > 0.0) {
                const double w1 = std::sin(f1 * (x * std::cos(o1) + y * std::sin(o1)) + p1);
                const double w2 = std::sin(f2 * (x * std::cos(o2) - y * std::sin(o2)) + p2);
                const double w3 = std::sin(f3 * (x + y) + p3);
                const double lower_fade =
                    1.0 - 0.5 * smoothstep(nose.y - 4.0, nose.y + 8.0, static_cast<double>(y));
                const double dv = tex_amp * (0.4 * w1 + 0.4 * w2 + 0.2 * w3) * head * lower_fade;
                img.at(y, x, 0) = clamp01(img.at(y, x, 0) + dv);
                img.at(y, x, 1) = clamp01(img.at(y, x, 1) + dv * 0.85);
                img.at(y, x, 2) = clamp01(img.at(y, x, 2) + dv * 0.7);
            }

            // Eyebrows.
            for (const Point2& e : {le, re}) {
                const double brow = ellipse_mask(x, y, e.x, e.y - 8.0, 9.0, brow_h);
                blend(img, y, x, hair, 0.85 * brow);
            }
            // Eyes: sclera, iris, pupil.
            for (const Point2& e : {le, re}) {
                blend(img, y, x, Rgb{0.93, 0.93, 0.93}, ellipse_mask(x, y, e.x, e.y, 7.0, 3.6));
                blend(img, y, x, iris, ellipse_mask(x, y, e.x, e.y, 3.0, 3.0));
                blend(img, y, x, Rgb{0.05, 0.05, 0.05}, ellipse_mask(x, y, e.x, e.y, 1.2, 1.2));
            }

            // Nose: ridge shadow plus tip highlight.
            const double ridge = ellipse_mask(x, y, nose.x - 2.0, (eye_y + nose.y) * 0.5, 2.2, 12.0);
            blend(img, y, x, Rgb{skin.r * 0.82, skin.g * 0.82, skin.b * 0.82}, 0.6 * ridge);
            const double tip = ellipse_mask(x, y, nose.x, nose.y, 5.0, 3.4);
            blend(img, y, x, Rgb{clamp01(skin.r * 1.12), clamp01(skin.g * 1.12), clamp01(skin.b * 1.1)}, 0.7 * tip);

            // Mouth.
            const double lips = ellipse_mask(x, y, mouth_cx, mouth_cy, 15.0, 4.5 * mouth_fullness);
            blend(img, y, x, Rgb{clamp01(skin.r * 1.05 + 0.1), skin.g * 0.55, skin.b * 0.55}, lips);
        }
    }

    // Variant jitter: gain/bias plus a faint deterministic noise field.
    Rng noise_rng = var_rng.substream("noise");
    for (double& v : img.data) {
        v = clamp01(v * gain + bias + noise_sigma * noise_rng.gaussian());
    }

    FaceSample sample;
    sample.image = std::move(img);
    sample.landmarks.assign(lm.begin(), lm.end());
    sample.identity = identity;
    sample.source_path = "synth://" + identity + "/" + std::to_string(variant);
    return sample;
}

}  // namespace advmask
