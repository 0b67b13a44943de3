// Generated by tools/gen_mms_cases.py. Do not edit by hand.
#pragma once

#include <cmath>
#include <numbers>

namespace grade2::mms::detail {

struct CaseValues {
    double u1, u2, du1dx, du1dy, du2dx, du2dy;
    double p, dpdx, dpdy, z, dzdx, dzdy, f1, f2, curl_f;
};

inline void poly_case(double x, double y, double nu, double alpha, CaseValues& v) {
    (void)nu; (void)alpha;
    const double x0 = 2*y;
    const double x1 = std::pow(x, 2);
    const double x2 = y - 1;
    const double x3 = x1*x2;
    const double x4 = x - 1;
    const double x5 = std::pow(x4, 2);
    const double x6 = x5*(x0 - 1);
    const double x7 = x0*x3*x6;
    const double x8 = 2*x;
    const double x9 = std::pow(y, 2);
    const double x10 = x4*x9;
    const double x11 = std::pow(x2, 2);
    const double x12 = x11*(x8 - 1);
    const double x13 = x10*x12*x8;
    const double x14 = x*y;
    const double x15 = x*x2;
    const double x16 = x4*y;
    const double x17 = x2*x4;
    const double x18 = 4*x14*x17*(x14 + x15 + x16 + x17);
    const double x19 = 4*x2;
    const double x20 = x11 + x19*y + x9;
    const double x21 = x1*x5;
    const double x22 = 4*x4;
    const double x23 = x*x22 + x1 + x5;
    const double x24 = x11*x9;
    const double x25 = -x9;
    const double x26 = 24*alpha;
    const double x27 = x*x26;
    const double x28 = x26*y;
    const double x29 = std::pow(x, 3);
    const double x30 = 2*x29;
    const double x31 = std::pow(x, 4);
    const double x32 = std::pow(y, 3);
    const double x33 = 2*x32;
    const double x34 = std::pow(y, 4);
    const double x35 = 144*alpha;
    const double x36 = x14*x35;
    const double x37 = 36*alpha;
    const double x38 = x1*x37;
    const double x39 = x26*x29;
    const double x40 = 12*alpha;
    const double x41 = x37*x9;
    const double x42 = x26*x32;
    const double x43 = x*x9;
    const double x44 = x*x32;
    const double x45 = 12*x44;
    const double x46 = 6*x34;
    const double x47 = x*x46;
    const double x48 = x1*y;
    const double x49 = x29*y;
    const double x50 = 12*x49;
    const double x51 = 6*x31;
    const double x52 = x51*y;
    const double x53 = x35*x43;
    const double x54 = x35*x48;
    const double x55 = 12*x1;
    const double x56 = x32*x55;
    const double x57 = 12*x9;
    const double x58 = x29*x57;
    const double x59 = x1*x9;
    const double x60 = -x;
    const double x61 = 6*x32;
    const double x62 = 3*x34;
    const double x63 = 72*alpha;
    const double x64 = x63*x9;
    const double x65 = 3*x1;
    const double x66 = 3*x9;
    const double x67 = 6*x14 - x36 - x40 + x45 + x50 + 18*x59 + x65 + x66;
    const double x68 = 6*x29;
    const double x69 = 3*x31;
    const double x70 = x1*x63;
    const double x71 = x2*x5;
    const double x72 = x14*x22 + x15*x22 + x3 + x48 + x5*y + x71;
    const double x73 = x72*y;
    const double x74 = x11*x4;
    const double x75 = 2*alpha;
    const double x76 = x*x11 + x10 + x14*x19 + x16*x19 + x43 + x74;
    const double x77 = x*x76;
    const double x78 = x11*x21 + x11*x59 + x24*x5 + 4*x43*x74 + 4*x48*x71 + x5*x59 - x75*(x0*x2*x23 + x2*x72 + 6*x21 + x73) - x75*(x20*x4*x8 + 6*x24 + x4*x76 + x77);
    const double x79 = 6*nu;
    const double x80 = 36*nu;
    const double x81 = 9*nu;
    const double x82 = x*x34;
    const double x83 = std::pow(y, 5);
    const double x84 = x*x83;
    const double x85 = std::pow(y, 6);
    const double x86 = x*x85;
    const double x87 = std::pow(y, 7);
    const double x88 = x31*y;
    const double x89 = std::pow(x, 5);
    const double x90 = x89*y;
    const double x91 = std::pow(x, 6);
    const double x92 = x91*y;
    const double x93 = std::pow(x, 7);
    const double x94 = 60*alpha;
    const double x95 = 120*alpha;
    const double x96 = 132*alpha;
    const double x97 = 84*alpha;
    const double x98 = 30*x34;
    const double x99 = x1*x83;
    const double x100 = 42*x85;
    const double x101 = x29*x34;
    const double x102 = x29*x83;
    const double x103 = x29*x85;
    const double x104 = x29*x87;
    const double x105 = 30*x31;
    const double x106 = x31*x32;
    const double x107 = 105*x31;
    const double x108 = x89*x9;
    const double x109 = x32*x89;
    const double x110 = 105*x34;
    const double x111 = 42*x91;
    const double x112 = x32*x91;
    const double x113 = x32*x93;
    const double x114 = alpha*x1;
    const double x115 = 396*alpha;
    const double x116 = alpha*x9;
    const double x117 = 240*alpha;
    const double x118 = 264*alpha;
    const double x119 = 168*alpha;
    const double x120 = 48*alpha;
    v.u1 = x7;
    v.u2 = -x13;
    v.du1dx = x18;
    v.du1dy = 2*x20*x21;
    v.du2dx = -2*x23*x24;
    v.du2dy = -x18;
    v.p = x1 + x25;
    v.dpdx = x8;
    v.dpdy = -x0;
    v.z = 8*alpha - 2*x1*x46 - 2*x1 + 2*x25 - 2*x27 - 2*x28 + 2*x30 + 2*x31*x40 - 2*x31 + 2*x33 + 2*x34*x40 - 2*x34 + 2*x35*x59 + 2*x36 + 2*x38 - 2*x39 + 2*x41 - 2*x42 + 12*x43 - 2*x45 + 2*x47 + 12*x48 - 2*x50 - 2*x51*x9 + 2*x52 - 2*x53 - 2*x54 - 2*x55*x9 + 2*x56 + 2*x58;
    v.dzdx = 4*x*x37 - 4*x30 - 4*x38 + 4*x39 - 48*x43 - 4*x47 - 72*x48 + 4*x53 - 4*x58 + 4*x60 - 4*x61 + 4*x62 + 4*x63*y - 4*x64 + 4*x67;
    v.dzdy = 4*x*x63 - 4*x33 + 4*x37*y - 4*x41 + 4*x42 - 72*x43 - 48*x48 - 4*x52 + 4*x54 - 4*x56 + 4*x67 - 4*x68 + 4*x69 - 4*x70 - 4*y;
    v.f1 = -4*nu*(x2*x73 + x6*x65) - 2*x13*x78 - 2*x60;
    v.f2 = 4*nu*(x12*x66 + x4*x77) - 2*x7*x78 - 2*y;
    v.curl_f = -8*nu*x61 + 8*nu*x62 - 8*nu*x68 + 8*nu*x69 + 8*nu - 8*x*x79 - 8*x0*x93 + 8*x1*x100 - 8*x1*x61 + 8*x1*x81 + 8*x1*x98 - 8*x100*x89 + 8*x101*x117 - 440*x101 - 8*x102*x118 + 960*x102 + 8*x103*x119 - 784*x103 - 8*x104*x120 + 224*x104 - 8*x105*x87 - 8*x105*x9 - 8*x106*x117 + 440*x106 - 8*x107*x83 + 8*x107*x85 - 8*x108*x115 + 432*x108 + 8*x109*x118 - 960*x109 + 8*x110*x89 - 8*x110*x91 + 8*x111*x83 - 8*x111*x9 - 8*x112*x119 + 784*x112 + 8*x113*x120 - 224*x113 + 1248*x114*x32 - 2880*x114*x34 - 2016*x114*x85 + 8*x115*x99 - 1248*x116*x29 + 2880*x116*x31 + 2016*x116*x91 + 8*x14*x80 - 8*x27*x87 + 8*x28*x93 + 8*x40*x43 - 8*x40*x48 - 8*x43*x80 - 8*x44*x94 + 8*x44 - 8*x48*x80 + 8*x49*x94 - 8*x49 - 8*x55*x87 + 8*x57*x93 + 8*x59*x80 - 8*x64*x93 + 8*x68*x9 + 8*x70*x87 - 8*x79*y + 8*x8*x87 + 8*x81*x9 + 8*x82*x95 - 40*x82 - 96*x83*x93 - 8*x84*x96 + 72*x84 + 8*x86*x97 - 56*x86 + 96*x87*x89 - 8*x88*x95 + 40*x88 + 8*x90*x96 - 72*x90 - 8*x92*x97 + 56*x92 + 8*x93*x98 - 432*x99;
}

inline void trig_case(double x, double y, double nu, double alpha, CaseValues& v) {
    (void)nu; (void)alpha;
    const double x0 = std::numbers::pi*y;
    const double x1 = std::cos(x0);
    const double x2 = std::numbers::pi*(x + 1.0/4.0);
    const double x3 = std::sin(x2);
    const double x4 = std::numbers::pi*x3;
    const double x5 = x1*x4;
    const double x6 = std::sin(x0);
    const double x7 = std::numbers::pi*x6;
    const double x8 = std::cos(x2);
    const double x9 = (1.0/10.0)*x8;
    const double x10 = std::pow(std::numbers::pi, 2);
    const double x11 = x1*x10;
    const double x12 = x11*x9;
    const double x13 = x10*x3;
    const double x14 = x13*x6;
    const double x15 = (1.0/10.0)*x14;
    const double x16 = std::numbers::pi*x;
    const double x17 = std::sin(x16);
    const double x18 = x1*std::cos(x16);
    const double x19 = 2*alpha*x10;
    const double x20 = x19 + 1;
    const double x21 = (1.0/5.0)*std::pow(std::numbers::pi, 3);
    const double x22 = x21*x6;
    const double x23 = x20*x8;
    const double x24 = 10*nu;
    v.u1 = (1.0/10.0)*x5 + 1;
    v.u2 = -x7*x9;
    v.du1dx = x12;
    v.du1dy = -x15;
    v.du2dx = x15;
    v.du2dy = -x12;
    v.p = x1*x17;
    v.dpdx = std::numbers::pi*x18;
    v.dpdy = -x17*x7;
    v.z = (1.0/5.0)*x14*x20;
    v.dzdx = x22*x23;
    v.dzdy = x1*x20*x21*x3;
    v.f1 = (1.0/50.0)*std::numbers::pi*(x11*x24*x3 + x13*x23*std::pow(x6, 2) + 50*x18);
    v.f2 = -1.0/50.0*x7*(x10*x24*x8 + 50*x17 - x20*x4*(x5 + 10));
    v.curl_f = x22*(2*nu*x4 + x19*x8 + x8);
}

} // namespace grade2::mms::detail
