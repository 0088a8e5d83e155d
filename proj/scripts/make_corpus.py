#!/usr/bin/env python3
"""Writes the bundled 84-chapter science corpus (one text file per chapter)."""

import os

CHAPTERS = [
    ("newtons_first_law", "Newton's First Law",
     "An object keeps its state of rest or uniform motion unless a net force acts on it. "
     "This tendency to resist changes in motion is called inertia. A coin resting on a card "
     "stays in place when the card is flicked away quickly, because the coin's inertia holds it still."),
    ("newtons_second_law", "Newton's Second Law",
     "The acceleration of an object equals the net force divided by its mass, written F = ma. "
     "Doubling the force on a cart doubles its acceleration, while doubling the mass halves it. "
     "This law links force, mass and motion in a single equation used throughout mechanics."),
    ("newtons_third_law", "Newton's Third Law",
     "For every action force there is an equal and opposite reaction force. "
     "A balloon shoots forward when air rushes out of its neck backward. "
     "Rockets work the same way: hot gas pushed down produces thrust pushing the rocket up."),
    ("gravity_free_fall", "Gravity and Free Fall",
     "Near the Earth's surface every object accelerates downward at about 9.8 meters per second squared. "
     "Without air resistance a hammer and a feather fall together and land at the same moment. "
     "The force of gravity on an object is its weight, equal to mass times gravitational acceleration."),
    ("friction", "Friction",
     "Friction is the force that resists sliding between two surfaces in contact. "
     "Rough surfaces and larger normal forces produce more friction. "
     "Lubricants such as oil fill in microscopic bumps and let surfaces slide more easily."),
    ("air_resistance", "Air Resistance and Terminal Velocity",
     "A body moving through air feels a drag force that grows with speed. "
     "A falling skydiver stops accelerating when drag balances weight, reaching terminal velocity. "
     "Crumpled paper falls faster than a flat sheet because its shape meets less air resistance."),
    ("buoyancy_archimedes", "Buoyancy and Archimedes' Principle",
     "A body immersed in a fluid is pushed upward by a force equal to the weight of the fluid it displaces. "
     "Ships made of steel float because their hollow hulls displace a large volume of water. "
     "A submerged object sinks when its weight exceeds the buoyant force."),
    ("density_flotation", "Density and Flotation",
     "Density is mass per unit volume. "
     "An object floats in a liquid when its average density is lower than that of the liquid. "
     "An egg sinks in fresh water but floats in strongly salted water because dissolving salt raises the water's density."),
    ("fluid_pressure", "Pressure in Fluids",
     "Pressure is force spread over an area, and in a fluid it acts in every direction. "
     "Pascal's principle says pressure applied to an enclosed fluid is transmitted undiminished throughout it. "
     "Hydraulic lifts use this to turn a small push on a narrow piston into a large force on a wide one."),
    ("atmospheric_pressure", "Atmospheric Pressure",
     "The weight of the air above us presses on every surface with about 101 kilopascals at sea level. "
     "Crushing a can by cooling the steam inside shows the atmosphere pushing on a region of lower pressure. "
     "Suction cups and drinking straws rely on the same outside push."),
    ("bernoulli_principle", "Bernoulli's Principle",
     "In a flowing fluid, regions of faster flow have lower pressure. "
     "Blowing across the top of a strip of paper makes the strip rise, since the moving air above it has reduced pressure. "
     "Airplane wings and atomizer sprays exploit this pressure difference."),
    ("magnus_effect", "The Magnus Effect",
     "A spinning ball moving through air drags a thin layer of air around with it, making the flow faster on one side. "
     "The resulting pressure difference pushes the ball sideways, curving its flight. "
     "Curveballs in baseball and banana kicks in football are everyday examples of the Magnus effect."),
    ("centripetal_force", "Centripetal Force and Circular Motion",
     "An object moving in a circle accelerates toward the center, which requires an inward net force. "
     "A bucket of water swung overhead keeps its water inside when the swing is fast enough. "
     "The string tension, gravity or friction can each supply the centripetal force."),
    ("angular_momentum", "Angular Momentum and Spinning Objects",
     "A spinning body keeps spinning unless a torque slows it down, and its angular momentum is conserved. "
     "A skater pulls in her arms to spin faster because reducing her radius must raise her rotation rate. "
     "Gyroscopes resist tipping for the same reason."),
    ("levers_simple_machines", "Levers and Simple Machines",
     "A lever trades force for distance around a pivot called the fulcrum. "
     "A long crowbar lets a small push lift a heavy rock, since force times lever arm balances on both sides. "
     "Scissors, seesaws and bottle openers are all levers."),
    ("pulleys_mechanical_advantage", "Pulleys and Mechanical Advantage",
     "A single fixed pulley changes the direction of a pull; combinations of pulleys reduce the force needed. "
     "With two supporting rope segments, lifting a load takes half the force but twice the rope length. "
     "The ratio of load to applied force is the mechanical advantage."),
    ("work_energy", "Work and Energy",
     "Work is done when a force moves an object through a distance along the force's direction. "
     "Energy is the capacity to do work and is measured in joules, just like work. "
     "Lifting a book onto a shelf stores the work done as gravitational potential energy."),
    ("kinetic_potential_energy", "Kinetic and Potential Energy",
     "Kinetic energy belongs to moving bodies and grows with the square of speed. "
     "Potential energy is stored by position or shape, as in a lifted weight or a stretched spring. "
     "A roller coaster continually converts one form into the other along its track."),
    ("conservation_of_energy", "Conservation of Energy",
     "Energy cannot be created or destroyed, only transformed between forms. "
     "A pendulum swaps height for speed on every swing, and friction slowly turns that energy into heat. "
     "Accounting for every form, the total energy of an isolated system stays constant."),
    ("momentum_collisions", "Momentum and Collisions",
     "Momentum is mass times velocity and is conserved when objects collide. "
     "In a Newton's cradle, the momentum of the incoming ball passes through the row and ejects the far ball. "
     "Soft crumple zones lengthen collision time to reduce the force on passengers."),
    ("elasticity_hooke", "Elasticity and Hooke's Law",
     "Springs stretch in proportion to the force applied, as long as the limit of elasticity is not passed. "
     "The constant of proportionality, the spring constant, measures stiffness. "
     "Spring scales convert this proportional stretch into a weight reading."),
    ("pendulum_resonance", "The Pendulum and Resonance",
     "A pendulum's period depends on its length and on gravity, not on the mass of the bob. "
     "Pushing a swing in time with its natural rhythm makes it rise higher, an example of resonance. "
     "Driving any oscillator at its natural frequency builds up a large amplitude."),
    ("waves_frequency", "Waves and Frequency",
     "A wave carries energy without carrying matter along with it. "
     "Frequency counts oscillations per second, and wave speed equals frequency times wavelength. "
     "Ripples on a pond and light from a lamp both obey this same relation."),
    ("sound_waves", "Sound Waves and Pitch",
     "Sound is a pressure wave produced by vibrating objects and needs a medium to travel. "
     "Faster vibrations give higher pitch; larger vibrations give louder sound. "
     "Sound travels about 343 meters per second in room-temperature air, faster in water and steel."),
    ("doppler_effect", "The Doppler Effect",
     "When a sound source approaches, its waves arrive compressed and the pitch sounds higher. "
     "As the source recedes, the waves stretch out and the pitch drops. "
     "The siren of a passing ambulance sweeps downward in tone for exactly this reason."),
    ("light_reflection", "Light Reflection",
     "Light bounces off smooth surfaces with the angle of reflection equal to the angle of incidence. "
     "Mirrors form images because every ray obeys this rule. "
     "Rough surfaces scatter rays in many directions, which is why paper shows no mirror image."),
    ("light_refraction", "Light Refraction",
     "Light bends when it passes between materials in which it travels at different speeds. "
     "A straw in a glass of water looks bent at the surface because rays from the submerged part change direction. "
     "The amount of bending is described by the refractive index of each material."),
    ("dispersion_rainbow", "Dispersion and Rainbows",
     "White light is a mixture of colors that refract by slightly different amounts. "
     "A glass prism spreads sunlight into a spectrum from red to violet. "
     "Raindrops refract and reflect sunlight the same way, painting a rainbow opposite the sun."),
    ("lenses_focal_point", "Lenses and Focal Points",
     "A convex lens bends parallel rays so they meet at a focal point. "
     "Objects beyond the focal length form real inverted images, as in a camera. "
     "A magnifying glass held close to print forms an enlarged upright virtual image instead."),
    ("total_internal_reflection", "Total Internal Reflection",
     "Light trying to leave a dense medium at a shallow angle is reflected back inside completely. "
     "Optical fibers trap light this way and pipe it along bends. "
     "A stream of water can guide a laser beam for the same reason."),
    ("static_electricity", "Static Electricity",
     "Rubbing certain materials transfers electrons, leaving one charged positive and the other negative. "
     "Like charges repel and opposite charges attract. "
     "A balloon rubbed on hair sticks to a wall because its charge attracts the wall's surface charges."),
    ("electric_circuits", "Electric Circuits and Current",
     "Electric current is a flow of charge driven around a closed loop by a battery or supply. "
     "A circuit needs an unbroken conducting path; a switch works by breaking that path. "
     "Series elements share the same current, while parallel branches share the same voltage."),
    ("ohms_law", "Ohm's Law and Resistance",
     "Voltage equals current times resistance in many conductors, written V = IR. "
     "A thin or long wire resists the flow of charge more than a thick or short one. "
     "Doubling the voltage across a fixed resistor doubles the current through it."),
    ("magnets_fields", "Magnets and Magnetic Fields",
     "Magnets have north and south poles; like poles repel and unlike poles attract. "
     "A magnetic field fills the space around a magnet, traced out by iron filings. "
     "The Earth itself is a huge magnet, which is why a compass needle points north."),
    ("electromagnetic_induction", "Electromagnetic Induction",
     "Moving a magnet near a coil of wire induces a voltage and drives a current. "
     "The faster the magnetic field changes, the larger the induced voltage. "
     "Generators, transformers and induction cooktops all rest on this effect."),
    ("electromagnets", "Electromagnets",
     "A current-carrying coil produces a magnetic field like that of a bar magnet. "
     "Winding the coil around an iron core and adding turns makes the field much stronger. "
     "Scrapyard cranes switch their electromagnets off to drop a load instantly."),
    ("heat_transfer", "Heat Conduction, Convection and Radiation",
     "Heat flows by conduction through solids, convection in moving fluids, and radiation across empty space. "
     "A metal spoon in hot soup warms by conduction while the soup circulates by convection. "
     "The Sun heats the Earth purely by radiation."),
    ("thermal_expansion", "Thermal Expansion and Contraction",
     "Most materials expand when heated and contract when cooled. "
     "Bridges include expansion joints so summer heat does not buckle the deck. "
     "A tight metal jar lid loosens under hot water because the metal expands more than the glass."),
    ("evaporation_condensation", "Evaporation and Condensation",
     "Evaporation turns liquid into vapor at the surface and draws heat from the remaining liquid. "
     "Sweating cools the body as water evaporates from the skin. "
     "Condensation releases that heat again when vapor returns to liquid on a cold surface."),
    ("states_of_matter", "Melting, Freezing and States of Matter",
     "Matter commonly exists as solid, liquid or gas, and changes state at characteristic temperatures. "
     "Ice melts at 0 degrees Celsius and water boils at 100 degrees Celsius at standard pressure. "
     "During a change of state the temperature holds steady while bonds form or break."),
    ("surface_tension", "Surface Tension and Capillary Action",
     "Water molecules attract each other, pulling the surface tight like an elastic skin. "
     "This surface tension lets a steel paperclip rest on water and insects walk across ponds. "
     "In narrow tubes, attraction to the walls draws water upward in capillary action."),
    ("center_of_mass", "Center of Mass and Balance",
     "An object balances when its center of mass sits above its support. "
     "A tightrope walker's pole lowers and widens the combined center of mass, making balance easier. "
     "A toy bird perched on a fingertip hides weights in its wings to move its center of mass under the beak."),
    ("atoms_elements", "Atoms and Elements",
     "All matter is built from atoms, each with a nucleus of protons and neutrons surrounded by electrons. "
     "An element is a substance whose atoms all carry the same number of protons. "
     "Hydrogen, oxygen, iron and gold are elements; they cannot be broken down by chemical means."),
    ("molecules_compounds", "Molecules and Compounds",
     "Atoms bond together into molecules, and compounds contain atoms of different elements in fixed ratios. "
     "Water is a compound of two hydrogen atoms bonded to one oxygen atom. "
     "The properties of a compound usually differ sharply from those of its elements."),
    ("periodic_table", "The Periodic Table",
     "Elements arranged by atomic number fall into columns with similar chemical behavior. "
     "Metals sit on the left, nonmetals on the right, with reactive alkali metals in the first column. "
     "The table lets chemists predict how an unfamiliar element will react."),
    ("chemical_physical_change", "Chemical and Physical Changes",
     "A physical change alters form but not identity, like ice melting into water. "
     "A chemical change produces new substances, signaled by color change, gas, light, heat or a precipitate. "
     "Tearing paper is physical; burning it is chemical."),
    ("combustion_fire_triangle", "Combustion and the Fire Triangle",
     "Burning needs fuel, oxygen and heat; remove any one side of this fire triangle and the flame dies. "
     "A candle snuffer works by cutting off oxygen. "
     "Combustion combines fuel with oxygen, releasing heat, light, carbon dioxide and water vapor."),
    ("metal_combustion", "Combustion of Metals",
     "Some metals burn once ignited, combining rapidly with oxygen to form oxides. "
     "Magnesium ribbon burns with a brilliant white light used in old camera flashes. "
     "Fine iron wool burns in air because its huge surface area meets oxygen quickly, while an iron bar does not."),
    ("oxidation_rust", "Oxidation and Rust",
     "Iron exposed to oxygen and moisture slowly forms flaky red-brown rust. "
     "Rusting is a slow oxidation that weakens structures over years. "
     "Paint, oil or a zinc coating protects iron by keeping air and water away from the metal."),
    ("acids_bases", "Acids and Bases",
     "Acids taste sour, release hydrogen ions in water and turn blue litmus red. "
     "Bases feel slippery, accept hydrogen ions and turn red litmus blue. "
     "Lemon juice and vinegar are everyday acids; baking soda and soap are everyday bases."),
    ("ph_indicators", "pH and Indicators",
     "The pH scale runs from 0 (strongly acidic) through 7 (neutral) to 14 (strongly basic). "
     "Indicators are dyes whose color depends on pH. "
     "Red cabbage juice shifts from red in acid to purple in neutral to green in base, making it a kitchen indicator."),
    ("neutralization", "Neutralization Reactions",
     "An acid and a base react to form water and a salt, canceling each other's properties. "
     "Antacid tablets neutralize excess stomach acid this way. "
     "Mixing equal strengths of vinegar and baking soda solution leaves a nearly neutral salt solution."),
    ("baking_soda_vinegar", "The Baking Soda and Vinegar Reaction",
     "Vinegar's acetic acid reacts with sodium bicarbonate to release carbon dioxide gas. "
     "The fizzing bubbles can inflate a balloon stretched over the bottle's neck. "
     "Model volcanoes erupt on this reaction, often with soap added to trap the gas in foam."),
    ("carbon_dioxide", "Properties of Carbon Dioxide",
     "Carbon dioxide is a colorless gas denser than air that does not support burning. "
     "Pouring the invisible gas from a jar onto a candle flame puts the flame out. "
     "Dissolved under pressure it gives soft drinks their fizz, and limewater turns milky in its presence."),
    ("oxygen_properties", "Properties of Oxygen",
     "Oxygen makes up about a fifth of the air and is needed for burning and for respiration. "
     "A glowing splint thrust into pure oxygen relights, the classic test for the gas. "
     "Hospitals store oxygen because the body uses it to release energy from food."),
    ("hydrogen_properties", "Properties of Hydrogen",
     "Hydrogen is the lightest gas and burns with a pale blue flame, forming only water. "
     "A lit splint at a test tube of hydrogen gives a squeaky pop. "
     "Hydrogen-filled balloons rise quickly, but helium is used for safety because hydrogen is flammable."),
    ("air_composition", "Nitrogen and the Composition of Air",
     "Air is about 78 percent nitrogen, 21 percent oxygen, and 1 percent argon and other gases. "
     "Nitrogen is unreactive at room temperature, which keeps the mixture stable. "
     "A candle burning in a sealed jar goes out after consuming the oxygen fraction, leaving mostly nitrogen."),
    ("solutions_solubility", "Solutions and Solubility",
     "A solution forms when a solute dissolves uniformly in a solvent, such as salt in water. "
     "Solubility measures how much solute a given amount of solvent can hold at a temperature. "
     "Stirring and heating speed up dissolving; most solids dissolve better in hot water."),
    ("saturation_crystallization", "Saturation and Crystal Growth",
     "A saturated solution holds as much solute as it can at its temperature. "
     "Cooling or evaporating a saturated solution forces the extra solute out as crystals. "
     "Rock candy grows as sugar crystallizes onto a string left in cooling syrup."),
    ("supersaturation", "Supersaturated Solutions",
     "Careful cooling can leave more solute dissolved than saturation normally allows. "
     "Such a supersaturated solution is unstable: one seed crystal triggers sudden crystallization. "
     "Sodium acetate hand warmers click a metal disc to start the freeze, releasing stored heat at once."),
    ("diffusion", "Diffusion in Liquids and Gases",
     "Particles move from crowded regions toward emptier ones, spreading out by random motion. "
     "A drop of food coloring slowly tints a whole glass of still water. "
     "Diffusion is faster in hot water because the molecules move faster."),
    ("osmosis", "Osmosis",
     "Osmosis is the movement of water through a membrane from dilute toward concentrated solutions. "
     "A gummy bear swells in pure water as water moves into its sugary interior. "
     "Plant cells stay firm because osmotic pressure pushes their membranes against the cell walls."),
    ("evaporation_distillation", "Evaporation and Distillation",
     "Evaporating a solution leaves dissolved solids behind, recovering salt from salt water. "
     "Distillation also captures the vapor, condensing it back to a pure liquid. "
     "Both methods separate mixtures using differences in boiling behavior."),
    ("filtration_mixtures", "Filtration and Mixtures",
     "A filter passes liquids and dissolved substances while trapping suspended solids. "
     "Sand separates from salt water by filtering, while the salt passes through with the water. "
     "Choosing a separation method starts with asking whether the mixture's parts differ in size, state or solubility."),
    ("chromatography", "Paper Chromatography",
     "Chromatography separates mixed dyes as a solvent carries them up paper at different speeds. "
     "Black marker ink often splits into blue, red and yellow bands. "
     "Each dye's distance traveled relative to the solvent front identifies it."),
    ("catalysts_reaction_rate", "Catalysts and Reaction Rate",
     "A catalyst speeds a reaction without being consumed by it. "
     "Potassium iodide makes hydrogen peroxide decompose rapidly, and with soap the oxygen foams up dramatically. "
     "Finely dividing reactants, heating, or concentrating solutions also raise reaction rates."),
    ("enzymes_yeast", "Enzymes",
     "Enzymes are biological catalysts that accelerate specific reactions in living things. "
     "Catalase in yeast and liver breaks hydrogen peroxide into water and oxygen, which is why peroxide foams on a cut. "
     "Each enzyme works best at a particular temperature and pH."),
    ("exothermic_reactions", "Exothermic Reactions",
     "Exothermic reactions release energy, warming their surroundings. "
     "Burning fuels and the reaction inside disposable hand warmers are exothermic. "
     "Dissolving calcium chloride in water noticeably heats the solution."),
    ("endothermic_reactions", "Endothermic Reactions",
     "Endothermic reactions absorb energy, cooling their surroundings. "
     "Mixing citric acid with baking soda solution makes the liquid measurably colder. "
     "Instant cold packs snap an inner pouch so ammonium nitrate dissolves and chills the pack."),
    ("electrolysis_water", "Electrolysis of Water",
     "Passing current through water splits it into hydrogen and oxygen gas. "
     "Twice as much hydrogen as oxygen collects, matching water's formula H2O. "
     "A pinch of salt or baking soda helps the water conduct the current."),
    ("batteries_electrochemistry", "Batteries and Electrochemistry",
     "A battery converts chemical energy into electrical energy using two different metals in an electrolyte. "
     "A lemon with zinc and copper electrodes powers a small LED. "
     "The more reactive metal dissolves slowly, pushing electrons around the external circuit."),
    ("polymers_slime", "Polymers and Slime",
     "Polymers are long chain molecules built from repeating units. "
     "Borax links the polymer chains in white glue into a stretchy network, turning it into slime. "
     "Cross-linking density controls whether the result flows, stretches or bounces."),
    ("non_newtonian_fluids", "Non-Newtonian Fluids",
     "Some mixtures change their thickness depending on how hard they are pushed. "
     "Cornstarch in water flows like cream when stirred slowly but feels solid when punched. "
     "Ketchup is the opposite kind: shaking thins it so it pours."),
    ("density_column", "Density Columns and Liquid Layers",
     "Liquids of different densities settle into layers, densest at the bottom. "
     "Honey, dish soap, water and oil stack into a colorful column when poured carefully. "
     "Small objects float at the layer whose density matches their own."),
    ("emulsions_oil_water", "Emulsions: Oil and Water",
     "Oil and water do not mix because water molecules attract each other more than they attract oil. "
     "Shaking disperses oil into droplets that soon merge and separate again. "
     "An emulsifier such as egg yolk coats the droplets and keeps mayonnaise blended."),
    ("soap_surfactants", "Soap and Surfactants",
     "Soap molecules have a water-loving head and an oil-loving tail. "
     "They surround grease droplets so water can wash them away. "
     "Dish soap dropped into peppered water makes the pepper rush outward by breaking the surface tension."),
    ("fermentation_carbonation", "Fermentation and Carbonation",
     "Yeast feeds on sugar and releases carbon dioxide and a little alcohol. "
     "Bread rises because bubbles of this gas are trapped in the dough. "
     "A balloon over a bottle of warm sugar water and yeast slowly inflates as fermentation proceeds."),
    ("flame_tests", "Flame Tests and Metal Ions",
     "Metal ions color flames with characteristic hues. "
     "Sodium burns orange-yellow, copper blue-green, potassium lilac and strontium red. "
     "Fireworks choose their metal salts to paint these colors across the sky."),
    ("crystal_structures", "Crystals and Their Shapes",
     "Crystals grow as particles stack in orderly repeating patterns. "
     "Salt forms cubes while snowflakes grow six-sided branches. "
     "Slow growth gives large well-formed crystals; rapid cooling gives many tiny ones."),
    ("starch_iodine", "The Iodine Test for Starch",
     "Iodine solution turns from orange-brown to deep blue-black in the presence of starch. "
     "A drop on potato or bread darkens immediately, while sugar solution stays brown. "
     "The color comes from iodine sliding inside the coiled starch molecule."),
    ("boyles_law", "Boyle's Law: Pressure and Volume",
     "At constant temperature, squeezing a gas into half the volume doubles its pressure. "
     "A sealed syringe resists compression more and more as the plunger advances. "
     "Bubbles rising from a diver expand as the surrounding pressure falls."),
    ("charles_law", "Charles's Law: Temperature and Volume",
     "At constant pressure, a gas expands in proportion to its absolute temperature. "
     "A balloon on a warm bottle inflates in hot water and shrinks in ice water. "
     "Dented ping-pong balls pop back out in hot water as the air inside expands."),
    ("sublimation_dry_ice", "Sublimation and Dry Ice",
     "Some solids pass directly to gas without melting, a change called sublimation. "
     "Dry ice, solid carbon dioxide at -78 degrees Celsius, sublimates into thick white fog in warm water. "
     "Mothballs and frost on freezer walls shrink the same way."),
    ("conservation_of_mass", "Conservation of Mass",
     "In a chemical reaction atoms are rearranged, never created or destroyed. "
     "The sealed flask of vinegar and baking soda weighs the same before and after fizzing. "
     "Open systems seem to lose mass only because a gas escapes the balance."),
]

def main():
    out_dir = os.path.join(os.path.dirname(__file__), "..", "data", "corpus")
    os.makedirs(out_dir, exist_ok=True)
    assert len(CHAPTERS) == 84, f"expected 84 chapters, have {len(CHAPTERS)}"
    for index, (slug, title, body) in enumerate(CHAPTERS, start=1):
        path = os.path.join(out_dir, f"ch{index:02d}_{slug}.txt")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(title + "\n\n" + body + "\n")
    print(f"wrote {len(CHAPTERS)} chapters to {out_dir}")

if __name__ == "__main__":
    main()
