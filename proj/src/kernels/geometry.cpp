#include <string>

#include "sdc/error.hpp"
#include "sdc/kernels/conv.hpp"

namespace sdc::kernels {

Conv1dGeometry Conv1dGeometry::make(std::size_t batch, std::size_t in_channels, std::size_t out_channels,
                                    std::size_t in_length, std::size_t kernel, std::size_t stride,
                                    std::size_t padding, std::size_t dilation) {
    if (stride < 1 || dilation < 1 || kernel < 1)
        fail(ErrorKind::ShapeMismatch, "conv1d: kernel, stride and dilation must be >= 1");
    const std::size_t span = dilation * (kernel - 1) + 1;
    const std::size_t padded = in_length + 2 * padding;
    if (padded < span)
        fail(ErrorKind::ShapeMismatch, "conv1d: input of length " + std::to_string(in_length) +
                                           " is shorter than the kernel span " + std::to_string(span));
    Conv1dGeometry g;
    g.batch = batch;
    g.in_channels = in_channels;
    g.out_channels = out_channels;
    g.in_length = in_length;
    g.kernel = kernel;
    g.stride = stride;
    g.padding = padding;
    g.dilation = dilation;
    g.out_length = (padded - span) / stride + 1;
    return g;
}

}  // namespace sdc::kernels
