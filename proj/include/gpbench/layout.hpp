#pragma once

// Fixed geometry for every stimulus family. All elements stay at least
// kMargin pixels inside the 100x100 canvas. README.md carries the same table.

namespace gpbench::layout {

inline constexpr int kMargin = 2;

// E1 position (common scale / non-aligned)
inline constexpr int kAxisX = 12;              // vertical axis column
inline constexpr int kTickLeft = 9;            // ticks span kTickLeft..kAxisX-1
inline constexpr int kTickStep = 10;           // one tick per 10 units
inline constexpr int kPositionRange = 60;      // block offset 0..60 below axis top
inline constexpr int kBlockMin = 4;            // block side range
inline constexpr int kBlockMax = 8;
inline constexpr int kAxisLength = kPositionRange + kBlockMax;  // rows covered by the axis line
inline constexpr int kCommonAxisTop = 20;
inline constexpr int kNonAlignedTopMin = 3;
inline constexpr int kNonAlignedTopMax = 97 - kAxisLength;
inline constexpr int kBlockXMin = 20;
inline constexpr int kBlockXMax = 90;          // right edge bound for the block

// E1 length
inline constexpr int kLengthMin = 1;
inline constexpr int kLengthMax = 96;

// E1 direction / angle
inline constexpr int kRayLength = 30;
inline constexpr int kRayCenterMin = 32;
inline constexpr int kRayCenterMax = 67;
inline constexpr int kOriginMarker = 3;        // filled square marking a ray's origin

// E1 area / volume
inline constexpr int kRadiusMin = 1;
inline constexpr int kRadiusMax = 40;
inline constexpr int kCubeMin = 1;
inline constexpr int kCubeMax = 20;

// E1 curvature
inline constexpr double kCurvatureMax = 0.088;

// E1 shading
inline constexpr int kPatch = 50;
inline constexpr int kPatchMin = 3;
inline constexpr int kPatchMax = 97 - kPatch;

// E2
inline constexpr int kPieRadius = 40;
inline constexpr int kPieCenter = 50;
inline constexpr int kE2BarWidth = 10;
inline constexpr int kE2BarGap = 8;
inline constexpr int kE2BarLeft = 9;
inline constexpr int kE2Baseline = 95;
inline constexpr int kE2PixelsPerUnit = 2;

// E3
inline constexpr double kE3PixelsPerUnit = 0.8;
inline constexpr int kE3Baseline = 94;
inline constexpr int kGroupedBarWidth = 7;
inline constexpr int kGroupedBarGap = 1;
inline constexpr int kGroupGap = 8;
inline constexpr int kGroupedLeft = 7;
inline constexpr int kStackedBarWidth = 12;
inline constexpr int kStackedBarGap = 6;
inline constexpr int kStackedLeft = 8;

// E4
inline constexpr int kE4LengthMin = 49;
inline constexpr int kE4LengthMax = 60;
inline constexpr int kE4BarWidth = 8;
inline constexpr int kFrameInner = 60;         // frame interior height = longest bar
inline constexpr int kFramePad = 2;            // white columns between bar and frame side
inline constexpr int kE4LeftXMin = 5;
inline constexpr int kE4LeftXMax = 35;
inline constexpr int kE4RightXMin = 55;
inline constexpr int kE4RightXMax = 85;
inline constexpr int kE4BottomMin = 62;
inline constexpr int kE4BottomMax = 96;

// E5: dots sit on the even-even sublattice so no two dots touch, even diagonally.
inline constexpr int kLatticeMin = 2;
inline constexpr int kLatticeMax = 96;
inline constexpr int kLatticeStep = 2;

}  // namespace gpbench::layout
