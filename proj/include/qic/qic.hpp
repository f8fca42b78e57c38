#pragma once

/// Umbrella header for the quantum image compression codec.

#include "qic/circuit.hpp"
#include "qic/codec.hpp"
#include "qic/encoders.hpp"
#include "qic/error.hpp"
#include "qic/image.hpp"
#include "qic/pipeline.hpp"
#include "qic/simulator.hpp"
#include "qic/standin.hpp"
#include "qic/transform.hpp"
