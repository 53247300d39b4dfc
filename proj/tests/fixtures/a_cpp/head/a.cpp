line1
line2
line3
line4
line5
line6
line7
line8
line9
context10
new11
new12
context13
line14
line15
line16
