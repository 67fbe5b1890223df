//! Bytecode instructions: decoding from and encoding to the `code` array of
//! a Code attribute. Every defined opcode is understood, so class files
//! produced by other tools decode in full.

use super::ClassError;

pub mod op {
    pub const NOP: u8 = 0x00;
    pub const ACONST_NULL: u8 = 0x01;
    pub const ICONST_M1: u8 = 0x02;
    pub const ICONST_0: u8 = 0x03;
    pub const ICONST_1: u8 = 0x04;
    pub const ICONST_2: u8 = 0x05;
    pub const ICONST_3: u8 = 0x06;
    pub const ICONST_4: u8 = 0x07;
    pub const ICONST_5: u8 = 0x08;
    pub const LCONST_0: u8 = 0x09;
    pub const LCONST_1: u8 = 0x0a;
    pub const FCONST_0: u8 = 0x0b;
    pub const FCONST_1: u8 = 0x0c;
    pub const FCONST_2: u8 = 0x0d;
    pub const DCONST_0: u8 = 0x0e;
    pub const DCONST_1: u8 = 0x0f;
    pub const BIPUSH: u8 = 0x10;
    pub const SIPUSH: u8 = 0x11;
    pub const LDC: u8 = 0x12;
    pub const LDC_W: u8 = 0x13;
    pub const LDC2_W: u8 = 0x14;
    pub const ILOAD: u8 = 0x15;
    pub const LLOAD: u8 = 0x16;
    pub const FLOAD: u8 = 0x17;
    pub const DLOAD: u8 = 0x18;
    pub const ALOAD: u8 = 0x19;
    pub const ILOAD_0: u8 = 0x1a;
    pub const LLOAD_0: u8 = 0x1e;
    pub const FLOAD_0: u8 = 0x22;
    pub const DLOAD_0: u8 = 0x26;
    pub const ALOAD_0: u8 = 0x2a;
    pub const IALOAD: u8 = 0x2e;
    pub const AALOAD: u8 = 0x32;
    pub const ISTORE: u8 = 0x36;
    pub const LSTORE: u8 = 0x37;
    pub const FSTORE: u8 = 0x38;
    pub const DSTORE: u8 = 0x39;
    pub const ASTORE: u8 = 0x3a;
    pub const ISTORE_0: u8 = 0x3b;
    pub const LSTORE_0: u8 = 0x3f;
    pub const FSTORE_0: u8 = 0x43;
    pub const DSTORE_0: u8 = 0x47;
    pub const ASTORE_0: u8 = 0x4b;
    pub const IASTORE: u8 = 0x4f;
    pub const AASTORE: u8 = 0x53;
    pub const POP: u8 = 0x57;
    pub const POP2: u8 = 0x58;
    pub const DUP: u8 = 0x59;
    pub const DUP_X1: u8 = 0x5a;
    pub const SWAP: u8 = 0x5f;
    pub const IADD: u8 = 0x60;
    pub const LADD: u8 = 0x61;
    pub const DADD: u8 = 0x63;
    pub const ISUB: u8 = 0x64;
    pub const IMUL: u8 = 0x68;
    pub const LMUL: u8 = 0x69;
    pub const FMUL: u8 = 0x6a;
    pub const DMUL: u8 = 0x6b;
    pub const IDIV: u8 = 0x6c;
    pub const DDIV: u8 = 0x6f;
    pub const IREM: u8 = 0x70;
    pub const IAND: u8 = 0x7e;
    pub const IOR: u8 = 0x80;
    pub const IXOR: u8 = 0x82;
    pub const IINC: u8 = 0x84;
    pub const I2L: u8 = 0x85;
    pub const I2F: u8 = 0x86;
    pub const I2D: u8 = 0x87;
    pub const L2I: u8 = 0x88;
    pub const L2D: u8 = 0x8a;
    pub const F2D: u8 = 0x8d;
    pub const D2I: u8 = 0x8e;
    pub const D2L: u8 = 0x8f;
    pub const LCMP: u8 = 0x94;
    pub const DCMPL: u8 = 0x97;
    pub const DCMPG: u8 = 0x98;
    pub const IFEQ: u8 = 0x99;
    pub const IFNE: u8 = 0x9a;
    pub const IFLT: u8 = 0x9b;
    pub const IFGE: u8 = 0x9c;
    pub const IFGT: u8 = 0x9d;
    pub const IFLE: u8 = 0x9e;
    pub const IF_ICMPEQ: u8 = 0x9f;
    pub const IF_ICMPNE: u8 = 0xa0;
    pub const IF_ICMPLT: u8 = 0xa1;
    pub const IF_ICMPGE: u8 = 0xa2;
    pub const IF_ICMPGT: u8 = 0xa3;
    pub const IF_ICMPLE: u8 = 0xa4;
    pub const IF_ACMPEQ: u8 = 0xa5;
    pub const IF_ACMPNE: u8 = 0xa6;
    pub const GOTO: u8 = 0xa7;
    pub const JSR: u8 = 0xa8;
    pub const RET: u8 = 0xa9;
    pub const TABLESWITCH: u8 = 0xaa;
    pub const LOOKUPSWITCH: u8 = 0xab;
    pub const IRETURN: u8 = 0xac;
    pub const LRETURN: u8 = 0xad;
    pub const FRETURN: u8 = 0xae;
    pub const DRETURN: u8 = 0xaf;
    pub const ARETURN: u8 = 0xb0;
    pub const RETURN: u8 = 0xb1;
    pub const GETSTATIC: u8 = 0xb2;
    pub const PUTSTATIC: u8 = 0xb3;
    pub const GETFIELD: u8 = 0xb4;
    pub const PUTFIELD: u8 = 0xb5;
    pub const INVOKEVIRTUAL: u8 = 0xb6;
    pub const INVOKESPECIAL: u8 = 0xb7;
    pub const INVOKESTATIC: u8 = 0xb8;
    pub const INVOKEINTERFACE: u8 = 0xb9;
    pub const INVOKEDYNAMIC: u8 = 0xba;
    pub const NEW: u8 = 0xbb;
    pub const NEWARRAY: u8 = 0xbc;
    pub const ANEWARRAY: u8 = 0xbd;
    pub const ARRAYLENGTH: u8 = 0xbe;
    pub const ATHROW: u8 = 0xbf;
    pub const CHECKCAST: u8 = 0xc0;
    pub const INSTANCEOF: u8 = 0xc1;
    pub const MONITORENTER: u8 = 0xc2;
    pub const MONITOREXIT: u8 = 0xc3;
    pub const WIDE: u8 = 0xc4;
    pub const MULTIANEWARRAY: u8 = 0xc5;
    pub const IFNULL: u8 = 0xc6;
    pub const IFNONNULL: u8 = 0xc7;
    pub const GOTO_W: u8 = 0xc8;
    pub const JSR_W: u8 = 0xc9;
}

/// Decoded operand of one instruction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    None,
    /// bipush
    Byte(i8),
    /// sipush
    Short(i16),
    /// newarray element type code
    ArrayType(u8),
    /// Constant pool index (ldc uses the one-byte form).
    Pool(u16),
    Local { index: u16, wide: bool },
    Iinc { index: u16, delta: i16, wide: bool },
    /// Branch offset relative to the instruction's own address.
    Branch(i32),
    TableSwitch { default: i32, low: i32, high: i32, offsets: Vec<i32> },
    LookupSwitch { default: i32, pairs: Vec<(i32, i32)> },
    InvokeInterface { index: u16, count: u8 },
    InvokeDynamic { index: u16 },
    MultiANewArray { index: u16, dimensions: u8 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Insn {
    pub opcode: u8,
    pub operand: Operand,
}

impl Insn {
    pub fn new(opcode: u8, operand: Operand) -> Self {
        Insn { opcode, operand }
    }

    pub fn simple(opcode: u8) -> Self {
        Insn { opcode, operand: Operand::None }
    }

    /// Constant pool index carried by this instruction, if any.
    pub fn pool_index(&self) -> Option<u16> {
        match self.operand {
            Operand::Pool(i)
            | Operand::InvokeInterface { index: i, .. }
            | Operand::InvokeDynamic { index: i }
            | Operand::MultiANewArray { index: i, .. } => Some(i),
            _ => None,
        }
    }

    pub(crate) fn pool_index_mut(&mut self) -> Option<&mut u16> {
        match &mut self.operand {
            Operand::Pool(i)
            | Operand::InvokeInterface { index: i, .. }
            | Operand::InvokeDynamic { index: i }
            | Operand::MultiANewArray { index: i, .. } => Some(i),
            _ => None,
        }
    }

    /// Encoded size when the instruction starts at `offset`.
    pub fn encoded_len(&self, offset: usize) -> usize {
        let pad = (4 - (offset + 1) % 4) % 4;
        match &self.operand {
            Operand::None => 1,
            Operand::Byte(_) | Operand::ArrayType(_) => 2,
            Operand::Short(_) => 3,
            Operand::Pool(_) => {
                if self.opcode == op::LDC {
                    2
                } else {
                    3
                }
            }
            Operand::Local { wide, .. } => {
                if *wide {
                    4
                } else {
                    2
                }
            }
            Operand::Iinc { wide, .. } => {
                if *wide {
                    6
                } else {
                    3
                }
            }
            Operand::Branch(_) => {
                if matches!(self.opcode, op::GOTO_W | op::JSR_W) {
                    5
                } else {
                    3
                }
            }
            Operand::TableSwitch { offsets, .. } => 1 + pad + 12 + 4 * offsets.len(),
            Operand::LookupSwitch { pairs, .. } => 1 + pad + 8 + 8 * pairs.len(),
            Operand::InvokeInterface { .. } | Operand::InvokeDynamic { .. } => 5,
            Operand::MultiANewArray { .. } => 4,
        }
    }

    /// True for instructions after which control never falls through.
    pub fn ends_block(&self) -> bool {
        matches!(
            self.opcode,
            op::GOTO
                | op::GOTO_W
                | op::RET
                | op::TABLESWITCH
                | op::LOOKUPSWITCH
                | op::IRETURN
                | op::LRETURN
                | op::FRETURN
                | op::DRETURN
                | op::ARETURN
                | op::RETURN
                | op::ATHROW
        )
    }
}

#[derive(Clone, Copy)]
enum Shape {
    None,
    Byte,
    Short,
    ArrayType,
    Pool1,
    Pool2,
    Local,
    Iinc,
    Branch2,
    Branch4,
    TableSwitch,
    LookupSwitch,
    InvokeInterface,
    InvokeDynamic,
    MultiANewArray,
    Wide,
}

fn shape_of(opcode: u8) -> Option<Shape> {
    use op::*;
    Some(match opcode {
        0x00..=0x0f => Shape::None,
        BIPUSH => Shape::Byte,
        SIPUSH => Shape::Short,
        LDC => Shape::Pool1,
        LDC_W | LDC2_W => Shape::Pool2,
        ILOAD..=ALOAD => Shape::Local,
        0x1a..=0x35 => Shape::None,
        ISTORE..=ASTORE => Shape::Local,
        0x3b..=0x83 => Shape::None,
        IINC => Shape::Iinc,
        0x85..=0x98 => Shape::None,
        IFEQ..=JSR => Shape::Branch2,
        RET => Shape::Local,
        TABLESWITCH => Shape::TableSwitch,
        LOOKUPSWITCH => Shape::LookupSwitch,
        IRETURN..=RETURN => Shape::None,
        GETSTATIC..=INVOKESTATIC => Shape::Pool2,
        INVOKEINTERFACE => Shape::InvokeInterface,
        INVOKEDYNAMIC => Shape::InvokeDynamic,
        NEW => Shape::Pool2,
        NEWARRAY => Shape::ArrayType,
        ANEWARRAY => Shape::Pool2,
        ARRAYLENGTH | ATHROW => Shape::None,
        CHECKCAST | INSTANCEOF => Shape::Pool2,
        MONITORENTER | MONITOREXIT => Shape::None,
        WIDE => Shape::Wide,
        MULTIANEWARRAY => Shape::MultiANewArray,
        IFNULL | IFNONNULL => Shape::Branch2,
        GOTO_W | JSR_W => Shape::Branch4,
        _ => return None,
    })
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    base: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], ClassError> {
        if self.pos + n > self.bytes.len() {
            return Err(ClassError::TruncatedInput { offset: self.base + self.pos, needed: n });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u1(&mut self) -> Result<u8, ClassError> {
        Ok(self.take(1)?[0])
    }
    fn u2(&mut self) -> Result<u16, ClassError> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }
    fn i4(&mut self) -> Result<i32, ClassError> {
        let b = self.take(4)?;
        Ok(i32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }
}

/// Decodes a `code` array. `base` is the array's offset in the enclosing
/// class file, used only for error positions.
pub fn decode(bytes: &[u8], base: usize) -> Result<Vec<Insn>, ClassError> {
    let mut c = Cursor { bytes, pos: 0, base };
    let mut out = Vec::new();
    while c.pos < bytes.len() {
        let at = c.pos;
        let opcode = c.u1()?;
        let shape = shape_of(opcode).ok_or_else(|| ClassError::Malformed {
            offset: base + at,
            reason: format!("undefined opcode 0x{opcode:02x}"),
        })?;
        let operand = match shape {
            Shape::None => Operand::None,
            Shape::Byte => Operand::Byte(c.u1()? as i8),
            Shape::Short => Operand::Short(c.u2()? as i16),
            Shape::ArrayType => Operand::ArrayType(c.u1()?),
            Shape::Pool1 => Operand::Pool(c.u1()? as u16),
            Shape::Pool2 => Operand::Pool(c.u2()?),
            Shape::Local => Operand::Local { index: c.u1()? as u16, wide: false },
            Shape::Iinc => Operand::Iinc { index: c.u1()? as u16, delta: c.u1()? as i8 as i16, wide: false },
            Shape::Branch2 => Operand::Branch(c.u2()? as i16 as i32),
            Shape::Branch4 => Operand::Branch(c.i4()?),
            Shape::TableSwitch | Shape::LookupSwitch => {
                let pad = (4 - (at + 1) % 4) % 4;
                c.take(pad)?;
                let default = c.i4()?;
                if matches!(shape, Shape::TableSwitch) {
                    let low = c.i4()?;
                    let high = c.i4()?;
                    if high < low {
                        return Err(ClassError::Malformed {
                            offset: base + at,
                            reason: "tableswitch high < low".into(),
                        });
                    }
                    let n = (high as i64 - low as i64 + 1) as usize;
                    let offsets = (0..n).map(|_| c.i4()).collect::<Result<_, _>>()?;
                    Operand::TableSwitch { default, low, high, offsets }
                } else {
                    let n = c.i4()?;
                    if n < 0 {
                        return Err(ClassError::Malformed {
                            offset: base + at,
                            reason: "negative lookupswitch npairs".into(),
                        });
                    }
                    let pairs = (0..n)
                        .map(|_| Ok((c.i4()?, c.i4()?)))
                        .collect::<Result<_, ClassError>>()?;
                    Operand::LookupSwitch { default, pairs }
                }
            }
            Shape::InvokeInterface => {
                let index = c.u2()?;
                let count = c.u1()?;
                c.u1()?;
                Operand::InvokeInterface { index, count }
            }
            Shape::InvokeDynamic => {
                let index = c.u2()?;
                c.u2()?;
                Operand::InvokeDynamic { index }
            }
            Shape::MultiANewArray => Operand::MultiANewArray { index: c.u2()?, dimensions: c.u1()? },
            Shape::Wide => {
                let inner = c.u1()?;
                let operand = match inner {
                    op::IINC => Operand::Iinc { index: c.u2()?, delta: c.u2()? as i16, wide: true },
                    op::ILOAD..=op::ALOAD | op::ISTORE..=op::ASTORE | op::RET => {
                        Operand::Local { index: c.u2()?, wide: true }
                    }
                    _ => {
                        return Err(ClassError::Malformed {
                            offset: base + at,
                            reason: format!("wide applied to opcode 0x{inner:02x}"),
                        })
                    }
                };
                out.push(Insn { opcode: inner, operand });
                continue;
            }
        };
        out.push(Insn { opcode, operand });
    }
    Ok(out)
}

pub fn encode(code: &[Insn]) -> Result<Vec<u8>, ClassError> {
    let mut out: Vec<u8> = Vec::new();
    for insn in code {
        let at = out.len();
        match &insn.operand {
            Operand::Local { index, wide: true } => {
                out.extend([op::WIDE, insn.opcode]);
                out.extend(index.to_be_bytes());
            }
            Operand::Iinc { index, delta, wide: true } => {
                out.extend([op::WIDE, insn.opcode]);
                out.extend(index.to_be_bytes());
                out.extend(delta.to_be_bytes());
            }
            operand => {
                out.push(insn.opcode);
                match operand {
                    Operand::None => {}
                    Operand::Byte(b) => out.push(*b as u8),
                    Operand::ArrayType(t) => out.push(*t),
                    Operand::Short(s) => out.extend(s.to_be_bytes()),
                    Operand::Pool(i) if insn.opcode == op::LDC => {
                        let b = u8::try_from(*i).map_err(|_| {
                            ClassError::InvariantViolation(format!("ldc operand #{i} exceeds one byte"))
                        })?;
                        out.push(b);
                    }
                    Operand::Pool(i) => out.extend(i.to_be_bytes()),
                    Operand::Local { index, .. } => {
                        let b = u8::try_from(*index).map_err(|_| {
                            ClassError::InvariantViolation(format!("local {index} needs a wide prefix"))
                        })?;
                        out.push(b);
                    }
                    Operand::Iinc { index, delta, .. } => {
                        let (Ok(i), Ok(d)) = (u8::try_from(*index), i8::try_from(*delta)) else {
                            return Err(ClassError::InvariantViolation(
                                "iinc operand needs a wide prefix".into(),
                            ));
                        };
                        out.extend([i, d as u8]);
                    }
                    Operand::Branch(off) => {
                        if matches!(insn.opcode, op::GOTO_W | op::JSR_W) {
                            out.extend(off.to_be_bytes());
                        } else {
                            let s = i16::try_from(*off).map_err(|_| {
                                ClassError::InvariantViolation(format!("branch offset {off} out of range"))
                            })?;
                            out.extend(s.to_be_bytes());
                        }
                    }
                    Operand::TableSwitch { default, low, high, offsets } => {
                        out.resize(out.len() + (4 - (at + 1) % 4) % 4, 0);
                        for v in [default, low, high] {
                            out.extend(v.to_be_bytes());
                        }
                        for o in offsets {
                            out.extend(o.to_be_bytes());
                        }
                    }
                    Operand::LookupSwitch { default, pairs } => {
                        out.resize(out.len() + (4 - (at + 1) % 4) % 4, 0);
                        out.extend(default.to_be_bytes());
                        out.extend((pairs.len() as i32).to_be_bytes());
                        for (k, o) in pairs {
                            out.extend(k.to_be_bytes());
                            out.extend(o.to_be_bytes());
                        }
                    }
                    Operand::InvokeInterface { index, count } => {
                        out.extend(index.to_be_bytes());
                        out.extend([*count, 0]);
                    }
                    Operand::InvokeDynamic { index } => {
                        out.extend(index.to_be_bytes());
                        out.extend([0, 0]);
                    }
                    Operand::MultiANewArray { index, dimensions } => {
                        out.extend(index.to_be_bytes());
                        out.push(*dimensions);
                    }
                }
            }
        }
        debug_assert_eq!(out.len() - at, insn.encoded_len(at));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_every_defined_opcode_shape() {
        let bytes = [
            op::ALOAD_0, op::BIPUSH, 0xff, op::SIPUSH, 0x01, 0x00, op::LDC, 7, op::LDC_W, 0, 9,
            op::ILOAD, 3, op::IINC, 1, 0xfe, op::WIDE, op::ALOAD, 0x01, 0x00, op::WIDE, op::IINC,
            0, 2, 0xff, 0xff, op::GOTO, 0xff, 0xfd, op::INVOKEINTERFACE, 0, 4, 2, 0,
            op::INVOKEDYNAMIC, 0, 5, 0, 0, op::MULTIANEWARRAY, 0, 6, 2, op::NEWARRAY, 10,
            op::RETURN,
        ];
        let code = decode(&bytes, 0).unwrap();
        assert_eq!(code[1].operand, Operand::Byte(-1));
        assert_eq!(code[2].operand, Operand::Short(256));
        assert_eq!(code[3].operand, Operand::Pool(7));
        assert_eq!(code[6].operand, Operand::Iinc { index: 1, delta: -2, wide: false });
        assert_eq!(code[7].operand, Operand::Local { index: 256, wide: true });
        assert_eq!(code[8].operand, Operand::Iinc { index: 2, delta: -1, wide: true });
        assert_eq!(code[9].operand, Operand::Branch(-3));
        assert_eq!(encode(&code).unwrap(), bytes);
    }

    #[test]
    fn switch_padding_depends_on_offset() {
        let code = vec![
            Insn::simple(op::ICONST_0),
            Insn::new(op::TABLESWITCH, Operand::TableSwitch { default: 20, low: 0, high: 1, offsets: vec![21, 22] }),
            Insn::simple(op::ICONST_0),
            Insn::new(op::LOOKUPSWITCH, Operand::LookupSwitch { default: 3, pairs: vec![(5, 9)] }),
        ];
        let bytes = encode(&code).unwrap();
        assert_eq!(bytes.len(), 1 + (1 + 2 + 20) + 1 + (1 + 2 + 16));
        assert_eq!(decode(&bytes, 0).unwrap(), code);
    }

    #[test]
    fn undefined_opcode_is_malformed() {
        assert!(matches!(decode(&[0xcb], 0), Err(ClassError::Malformed { .. })));
        assert!(matches!(decode(&[op::SIPUSH, 1], 0), Err(ClassError::TruncatedInput { .. })));
    }

    #[test]
    fn ldc_index_must_fit_one_byte() {
        let code = vec![Insn::new(op::LDC, Operand::Pool(300))];
        assert!(matches!(encode(&code), Err(ClassError::InvariantViolation(_))));
    }
}
