#pragma once

#include "jjchain/anchor.hpp"
#include "jjchain/circuit.hpp"
#include "jjchain/constants.hpp"
#include "jjchain/design.hpp"
#include "jjchain/error.hpp"
#include "jjchain/extraction/dc.hpp"
#include "jjchain/extraction/dispersion_fit.hpp"
#include "jjchain/extraction/impedance.hpp"
#include "jjchain/extraction/s11.hpp"
#include "jjchain/geometry.hpp"
#include "jjchain/least_squares.hpp"
#include "jjchain/peaks.hpp"
#include "jjchain/spectrum.hpp"
#include "jjchain/synth.hpp"
